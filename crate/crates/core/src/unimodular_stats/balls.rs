//! Canonical codes of rooted balls and empirical ball statistics.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use rand::Rng;

use crate::enddecomp::View;
use crate::error::{Error, Result};
use crate::multigraph::{ball, MultiGraph, VertexId};
use crate::seed::rng_for;

fn refine(adj: &[Vec<VertexId>], colour: &mut [u32]) {
    let n = colour.len();
    let mut classes = {
        let mut c = colour.to_vec();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    loop {
        let signatures: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u32> = adj[v].iter().map(|&w| colour[w]).collect();
                nb.sort_unstable();
                (colour[v], nb)
            })
            .collect();
        let mut sorted: Vec<&(u32, Vec<u32>)> = signatures.iter().collect();
        sorted.sort();
        sorted.dedup();
        for v in 0..n {
            colour[v] = sorted.binary_search(&&signatures[v]).unwrap() as u32;
        }
        if sorted.len() == classes {
            return;
        }
        classes = sorted.len();
    }
}

fn leb128(out: &mut Vec<u8>, mut x: u64) {
    loop {
        let byte = (x & 0x7f) as u8;
        x >>= 7;
        if x == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn encode(g: &MultiGraph, position: &[u32]) -> Vec<u8> {
    let mut triples: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (_, u, v) in g.edges() {
        let (a, b) = (position[u], position[v]);
        *triples.entry((a.min(b), a.max(b))).or_default() += 1;
    }
    let mut out = Vec::new();
    leb128(&mut out, g.num_vertices() as u64);
    leb128(&mut out, triples.len() as u64);
    for ((a, b), k) in triples {
        leb128(&mut out, a as u64);
        leb128(&mut out, b as u64);
        leb128(&mut out, k);
    }
    out
}

fn search(g: &MultiGraph, adj: &[Vec<VertexId>], colour: Vec<u32>, best: &mut Option<Vec<u8>>) {
    let n = colour.len();
    let mut size = vec![0usize; n];
    for &c in &colour {
        size[c as usize] += 1;
    }
    let Some(cell) = (0..n).find(|&c| size[c] > 1) else {
        let code = encode(g, &colour);
        if best.as_ref().map_or(true, |b| code < *b) {
            *best = Some(code);
        }
        return;
    };
    for v in (0..n).filter(|&v| colour[v] as usize == cell) {
        let mut next: Vec<u32> = colour
            .iter()
            .enumerate()
            .map(|(u, &c)| 2 * c + u32::from(c as usize == cell && u != v))
            .collect();
        refine(adj, &mut next);
        search(g, adj, next, best);
    }
}

/// Code of `(g, root)` that is equal for two rooted multigraphs exactly when
/// they are isomorphic by a root-preserving map. Colour refinement with
/// individualisation; the code is the smallest adjacency encoding over all
/// leaves of the search.
pub fn canonical_code(g: &MultiGraph, root: VertexId) -> Vec<u8> {
    let n = g.num_vertices();
    let adj: Vec<Vec<VertexId>> = (0..n).map(|v| g.neighbors(v).map(|(_, w)| w).collect()).collect();
    let mut colour: Vec<u32> = (0..n).map(|v| u32::from(v != root)).collect();
    refine(&adj, &mut colour);
    let mut best = None;
    search(g, &adj, colour, &mut best);
    best.unwrap_or_default()
}

pub fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

/// Hex canonical code of the ball of radius `r` around `x`.
pub fn ball_code(g: &MultiGraph, x: VertexId, r: usize) -> Result<String> {
    let b = ball(g, x, r)?;
    Ok(to_hex(&canonical_code(&b.subgraph.graph, b.root)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallDistribution {
    pub radius: usize,
    /// Hex code -> count.
    pub counts: BTreeMap<String, u64>,
    pub samples: u64,
}

impl BallDistribution {
    pub fn new(radius: usize) -> Self {
        BallDistribution {
            radius,
            counts: BTreeMap::new(),
            samples: 0,
        }
    }

    pub fn add(&mut self, code: String, count: u64) {
        *self.counts.entry(code).or_default() += count;
        self.samples += count;
    }

    pub fn frequency(&self, code: &str) -> f64 {
        self.counts.get(code).copied().unwrap_or(0) as f64 / self.samples as f64
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("balls r={} n={}\n", self.radius, self.samples);
        for (code, count) in &self.counts {
            writeln!(out, "{code} {count}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let parse_err = |line: usize, msg: &str| Error::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (i, header) = lines.next().ok_or_else(|| parse_err(0, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let value = |prefix: &str, field: Option<&&str>| -> Result<u64> {
            field
                .and_then(|f| f.strip_prefix(prefix))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| parse_err(i, "expected `balls r=<r> n=<n>`"))
        };
        if fields.first() != Some(&"balls") || fields.len() != 3 {
            return Err(parse_err(i, "expected `balls r=<r> n=<n>`"));
        }
        let radius = value("r=", fields.get(1))? as usize;
        let samples = value("n=", fields.get(2))?;
        let mut dist = BallDistribution::new(radius);
        for (i, line) in lines {
            let mut it = line.split_whitespace();
            let (Some(code), Some(count), None) = (it.next(), it.next(), it.next()) else {
                return Err(parse_err(i, "expected `<code_hex> <count>`"));
            };
            if code.is_empty() || !code.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(parse_err(i, "code is not hex"));
            }
            let count: u64 = count.parse().map_err(|_| parse_err(i, "bad count"))?;
            dist.add(code.to_string(), count);
        }
        if dist.samples != samples {
            return Err(parse_err(i, "counts do not sum to n"));
        }
        Ok(dist)
    }
}

/// Every vertex of `g` as a root once: the exact law under a uniform root.
pub fn exact_ball_distribution(g: &MultiGraph, r: usize) -> Result<BallDistribution> {
    if g.num_vertices() == 0 {
        return Err(Error::Empty("graph"));
    }
    let mut dist = BallDistribution::new(r);
    for v in 0..g.num_vertices() {
        dist.add(ball_code(g, v, r)?, 1);
    }
    Ok(dist)
}

/// `samples` uniform roots drawn with replacement.
pub fn sample_balls(g: &MultiGraph, r: usize, samples: u64, seed: u64) -> Result<BallDistribution> {
    if g.num_vertices() == 0 {
        return Err(Error::Empty("graph"));
    }
    let mut rng = rng_for(seed, "roots", 0);
    let mut dist = BallDistribution::new(r);
    let mut cache: BTreeMap<VertexId, String> = BTreeMap::new();
    for _ in 0..samples {
        let v = rng.gen_range(0..g.num_vertices());
        let code = match cache.get(&v) {
            Some(c) => c.clone(),
            None => {
                let c = ball_code(g, v, r)?;
                cache.insert(v, c.clone());
                c
            }
        };
        dist.add(code, 1);
    }
    Ok(dist)
}

/// Law of the oracle's rooted graph seen to radius `r`: the origin's ball
/// with mass `samples`.
pub fn oracle_ball_distribution(name: &str, r: usize, samples: u64) -> Result<BallDistribution> {
    let view = View::named(name, r)?;
    let mut dist = BallDistribution::new(r);
    dist.add(to_hex(&canonical_code(&view.graph, view.origin())), samples.max(1));
    Ok(dist)
}

/// Exact total variation distance `1/2 sum |p - q|`.
pub fn tv_distance_exact(p: &BallDistribution, q: &BallDistribution) -> Result<Ratio<u128>> {
    if p.radius != q.radius {
        return Err(Error::RadiusMismatch(p.radius, q.radius));
    }
    if p.samples == 0 || q.samples == 0 {
        return Err(Error::Empty("ball distribution"));
    }
    let (np, nq) = (p.samples as u128, q.samples as u128);
    let mut total: u128 = 0;
    for code in p.counts.keys().chain(q.counts.keys().filter(|c| !p.counts.contains_key(*c))) {
        let a = p.counts.get(code).copied().unwrap_or(0) as u128 * nq;
        let b = q.counts.get(code).copied().unwrap_or(0) as u128 * np;
        total += a.abs_diff(b);
    }
    Ok(Ratio::new(total, 2 * np * nq))
}

pub fn tv_distance(p: &BallDistribution, q: &BallDistribution) -> Result<f64> {
    let r = tv_distance_exact(p, q)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

/// `inf { 2^-r : B(g, o, r) ~ B(h, p, r) }` over `r <= max_radius`.
pub fn local_distance(g: &MultiGraph, o: VertexId, h: &MultiGraph, p: VertexId, max_radius: usize) -> Result<f64> {
    let mut agree = 0;
    for r in 1..=max_radius {
        if ball_code(g, o, r)? != ball_code(h, p, r)? {
            break;
        }
        agree = r;
    }
    Ok(0.5f64.powi(agree as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, path, torus_triangulation};
    use proptest::prelude::{any, prop, prop_assert_eq, proptest, Just, ProptestConfig, Strategy};

    fn heap_perm_iso(g: &MultiGraph, a: VertexId, h: &MultiGraph, b: VertexId) -> bool {
        let n = g.num_vertices();
        if n != h.num_vertices() || g.num_edges() != h.num_edges() {
            return false;
        }
        let mult = |g: &MultiGraph| {
            let mut m = vec![0usize; n * n];
            for (_, u, v) in g.edges() {
                m[u * n + v] += 1;
                m[v * n + u] += 1;
            }
            m
        };
        let (mg, mh) = (mult(g), mult(h));
        let others: Vec<VertexId> = (0..n).filter(|&v| v != b).collect();
        let mut perm = others.clone();
        let rest_g: Vec<VertexId> = (0..n).filter(|&v| v != a).collect();
        // image[v] for v in g
        let check = |perm: &[VertexId]| {
            let mut image = vec![0; n];
            image[a] = b;
            for (i, &v) in rest_g.iter().enumerate() {
                image[v] = perm[i];
            }
            (0..n).all(|u| (0..n).all(|v| mg[u * n + v] == mh[image[u] * n + image[v]]))
        };
        let k = perm.len();
        let mut c = vec![0usize; k];
        if check(&perm) {
            return true;
        }
        let mut i = 0;
        while i < k {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                if check(&perm) {
                    return true;
                }
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        false
    }

    fn arb_rooted(max_n: usize) -> impl Strategy<Value = (MultiGraph, VertexId)> {
        (1..=max_n).prop_flat_map(|n| {
            let pairs = prop::collection::vec((0..n, 0..n), 0..=2 * n);
            (Just(n), pairs, 0..n)
        })
        .prop_map(|(n, pairs, root)| {
            let mut g = MultiGraph::new(n);
            for (u, v) in pairs {
                if u != v {
                    g.add_edge(u, v).unwrap();
                }
            }
            (g, root)
        })
    }

    fn relabel(g: &MultiGraph, perm: &[VertexId]) -> MultiGraph {
        let mut h = MultiGraph::new(g.num_vertices());
        let mut edges: Vec<(VertexId, VertexId)> = g.edges().map(|(_, u, v)| (perm[v], perm[u])).collect();
        edges.reverse();
        for (u, v) in edges {
            h.add_edge(u, v).unwrap();
        }
        h
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn codes_are_invariant_under_relabelling((g, root) in arb_rooted(9), shuffle in any::<u64>()) {
            let n = g.num_vertices();
            let mut perm: Vec<VertexId> = (0..n).collect();
            let mut rng = rng_for(shuffle, "perm", 0);
            for i in (1..n).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let h = relabel(&g, &perm);
            prop_assert_eq!(canonical_code(&g, root), canonical_code(&h, perm[root]));
        }

        #[test]
        fn codes_match_brute_force((g, a) in arb_rooted(7), (h, b) in arb_rooted(7)) {
            let same = canonical_code(&g, a) == canonical_code(&h, b);
            prop_assert_eq!(same, heap_perm_iso(&g, a, &h, b));
        }
    }

    /// Groups all rooted graphs by code and checks each group against the
    /// brute-force isomorphism test.
    fn census(graphs: Vec<MultiGraph>) {
        let mut groups: BTreeMap<Vec<u8>, Vec<(usize, VertexId)>> = BTreeMap::new();
        for (i, g) in graphs.iter().enumerate() {
            for root in 0..g.num_vertices() {
                groups.entry(canonical_code(g, root)).or_default().push((i, root));
            }
        }
        let reps: Vec<(usize, VertexId)> = groups.values().map(|m| m[0]).collect();
        for members in groups.values() {
            let (i, a) = members[0];
            for &(j, b) in &members[1..] {
                assert!(heap_perm_iso(&graphs[i], a, &graphs[j], b));
            }
        }
        for (k, &(i, a)) in reps.iter().enumerate() {
            for &(j, b) in &reps[k + 1..] {
                assert!(!heap_perm_iso(&graphs[i], a, &graphs[j], b));
            }
        }
    }

    #[test]
    fn exhaustive_small_census() {
        let pairs5: Vec<(VertexId, VertexId)> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
        let simple: Vec<MultiGraph> = (0u32..1 << pairs5.len())
            .map(|mask| {
                let edges: Vec<_> = pairs5.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
                MultiGraph::from_edges(5, &edges).unwrap()
            })
            .collect();
        census(simple);
        let pairs4: Vec<(VertexId, VertexId)> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        let multi: Vec<MultiGraph> = (0..3u32.pow(pairs4.len() as u32))
            .map(|mut code| {
                let mut edges = Vec::new();
                for &p in &pairs4 {
                    for _ in 0..code % 3 {
                        edges.push(p);
                    }
                    code /= 3;
                }
                MultiGraph::from_edges(4, &edges).unwrap()
            })
            .collect();
        census(multi);
    }

    #[test]
    fn near_misses_are_distinguished() {
        // same degree sequence, rooted at a vertex of the triangle vs the square
        let two_cycles = MultiGraph::from_edges(7, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 6), (6, 3)]).unwrap();
        let seven = cycle(7);
        assert_ne!(canonical_code(&two_cycles, 0), canonical_code(&seven, 0));
        assert_ne!(canonical_code(&two_cycles, 0), canonical_code(&two_cycles, 3));
        assert!(!heap_perm_iso(&two_cycles, 0, &two_cycles, 3));
        // the two 3-regular graphs on 6 vertices
        let prism = crate::generators::prism();
        let k33 = crate::generators::complete_bipartite(3, 3);
        assert_ne!(canonical_code(&prism, 0), canonical_code(&k33, 0));
        let bundle = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let single = MultiGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_ne!(canonical_code(&bundle, 0), canonical_code(&single, 0));
    }

    #[test]
    fn cycle_and_path_statistics() {
        let c = exact_ball_distribution(&cycle(100), 2).unwrap();
        assert_eq!(c.counts.len(), 1);
        let p = exact_ball_distribution(&path(100), 1).unwrap();
        let mut counts: Vec<u64> = p.counts.values().copied().collect();
        counts.sort();
        assert_eq!(counts, vec![2, 98]);
        let t = exact_ball_distribution(&torus_triangulation(10, 10), 1).unwrap();
        assert_eq!(t.counts.len(), 1);
        let code = t.counts.keys().next().unwrap();
        // a wheel with six spokes: 7 vertices, 12 edges
        assert!(code.starts_with("07"));
    }

    #[test]
    fn text_round_trip() {
        let d = sample_balls(&path(30), 2, 200, 4).unwrap();
        assert_eq!(d.samples, 200);
        assert_eq!(d.counts.values().sum::<u64>(), 200);
        let back = BallDistribution::parse(&d.to_text()).unwrap();
        assert_eq!(back, d);
        assert!(BallDistribution::parse("balls r=1 n=3\nab 2\n").is_err());
        assert!(BallDistribution::parse("balls r=1\n").is_err());
        assert!(BallDistribution::parse("balls r=1 n=1\nzz 1\n").is_err());
    }

    #[test]
    fn tv_basics() {
        let a = exact_ball_distribution(&path(20), 2).unwrap();
        let b = exact_ball_distribution(&cycle(20), 2).unwrap();
        assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        let mut c = BallDistribution::new(2);
        c.add("00".into(), 5);
        assert_eq!(tv_distance(&a, &c).unwrap(), 1.0);
        assert!(matches!(tv_distance(&a, &exact_ball_distribution(&path(20), 1).unwrap()), Err(Error::RadiusMismatch(2, 1))));
        let line = oracle_ball_distribution("path", 3, 1).unwrap();
        for n in [50u128, 100, 200] {
            let p = exact_ball_distribution(&path(n as usize), 3).unwrap();
            assert_eq!(tv_distance_exact(&p, &line).unwrap(), Ratio::new(6, n));
        }
        assert_eq!(tv_distance(&exact_ball_distribution(&cycle(100), 3).unwrap(), &line).unwrap(), 0.0);
        assert!(tv_distance(&a, &b).unwrap() > 0.0);
    }

    #[test]
    fn tv_is_a_metric_on_random_triples() {
        let graphs: Vec<MultiGraph> = (0..6).map(|s| crate::generators::random_connected_planar(3, s)).collect();
        let dists: Vec<BallDistribution> = graphs.iter().map(|g| exact_ball_distribution(g, 1).unwrap()).collect();
        for x in &dists {
            for y in &dists {
                let dxy = tv_distance_exact(x, y).unwrap();
                assert_eq!(dxy, tv_distance_exact(y, x).unwrap());
                for z in &dists {
                    assert!(dxy <= tv_distance_exact(x, z).unwrap() + tv_distance_exact(z, y).unwrap());
                }
            }
        }
    }

    #[test]
    fn local_distance_of_path_and_cycle() {
        let c = cycle(12);
        let p = path(30);
        // balls agree up to radius 5, where the cycle closes up
        assert_eq!(local_distance(&c, 0, &p, 15, 10).unwrap(), 0.5f64.powi(5));
        assert_eq!(local_distance(&c, 0, &c, 3, 8).unwrap(), 0.5f64.powi(8));
    }
}
