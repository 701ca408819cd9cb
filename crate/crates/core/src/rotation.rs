//! Rotation systems (combinatorial embeddings) and face tracing.
//!
//! A rotation system stores, for every dart, the next dart clockwise around
//! its base vertex. Faces are traced with the rule: leave along dart `d`,
//! arrive at the far endpoint on `twin(d)`, continue with `succ(twin(d))`.

use std::fmt::Write as _;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::multigraph::{twin, DartId, MultiGraph, VertexId};
use crate::seed::rng_for;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RotationSystem {
    succ: Vec<DartId>,
    tail: Vec<VertexId>,
    num_vertices: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceSet {
    /// Each face as the sequence of darts traversed.
    pub faces: Vec<Vec<DartId>>,
}

impl FaceSet {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Face lengths in decreasing order.
    pub fn length_profile(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.faces.iter().map(Vec::len).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }
}

impl RotationSystem {
    /// Builds a rotation system from one cyclic dart order per vertex.
    pub fn from_cyclic_orders(g: &MultiGraph, orders: &[Vec<DartId>]) -> Result<Self> {
        if orders.len() != g.num_vertices() {
            return Err(Error::MalformedRotation(format!(
                "expected {} vertex orders, got {}",
                g.num_vertices(),
                orders.len()
            )));
        }
        let mut succ = vec![usize::MAX; g.num_darts()];
        for (v, order) in orders.iter().enumerate() {
            if order.len() != g.degree(v) {
                return Err(Error::MalformedRotation(format!(
                    "vertex {v} has degree {} but its order lists {} darts",
                    g.degree(v),
                    order.len()
                )));
            }
            for (i, &d) in order.iter().enumerate() {
                if d >= g.num_darts() || g.dart_tail(d) != v {
                    return Err(Error::MalformedRotation(format!(
                        "dart {d} is not based at vertex {v}"
                    )));
                }
                if succ[d] != usize::MAX {
                    return Err(Error::MalformedRotation(format!("dart {d} listed twice")));
                }
                succ[d] = order[(i + 1) % order.len()];
            }
        }
        Ok(RotationSystem {
            succ,
            tail: (0..g.num_darts()).map(|d| g.dart_tail(d)).collect(),
            num_vertices: g.num_vertices(),
        })
    }

    /// Rotation that lists the darts at each vertex in incidence order.
    pub fn incidence_order(g: &MultiGraph) -> Self {
        let orders: Vec<Vec<DartId>> = (0..g.num_vertices())
            .map(|v| g.darts_at(v).to_vec())
            .collect();
        Self::from_cyclic_orders(g, &orders).expect("incidence lists are valid")
    }

    /// Builds from a successor array, checking that every cycle of `succ`
    /// covers exactly the darts of one vertex.
    pub fn from_successors(g: &MultiGraph, succ: Vec<DartId>) -> Result<Self> {
        if succ.len() != g.num_darts() {
            return Err(Error::MalformedRotation("successor array length".into()));
        }
        let mut orders = Vec::with_capacity(g.num_vertices());
        for v in 0..g.num_vertices() {
            let mut order = Vec::new();
            if let Some(&start) = g.darts_at(v).first() {
                let mut d = start;
                loop {
                    if d >= succ.len() || order.len() > g.degree(v) {
                        return Err(Error::MalformedRotation(format!(
                            "successor cycle at vertex {v} is broken"
                        )));
                    }
                    order.push(d);
                    d = succ[d];
                    if d == start {
                        break;
                    }
                }
            }
            orders.push(order);
        }
        Self::from_cyclic_orders(g, &orders)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.succ.len() / 2
    }

    pub fn num_darts(&self) -> usize {
        self.succ.len()
    }

    pub fn succ(&self, d: DartId) -> DartId {
        self.succ[d]
    }

    pub fn successors(&self) -> &[DartId] {
        &self.succ
    }

    pub fn tail(&self, d: DartId) -> VertexId {
        self.tail[d]
    }

    /// Cyclic order at `v`, starting from its smallest dart.
    pub fn rotation_at(&self, v: VertexId) -> Vec<DartId> {
        let Some(start) = (0..self.succ.len()).find(|&d| self.tail[d] == v) else {
            return Vec::new();
        };
        let mut out = vec![start];
        let mut d = self.succ[start];
        while d != start {
            out.push(d);
            d = self.succ[d];
        }
        out
    }

    /// All per-vertex cyclic orders, each starting at its smallest dart.
    pub fn cyclic_orders(&self) -> Vec<Vec<DartId>> {
        let mut first = vec![usize::MAX; self.num_vertices];
        for d in (0..self.succ.len()).rev() {
            first[self.tail[d]] = d;
        }
        first
            .iter()
            .map(|&start| {
                if start == usize::MAX {
                    return Vec::new();
                }
                let mut out = vec![start];
                let mut d = self.succ[start];
                while d != start {
                    out.push(d);
                    d = self.succ[d];
                }
                out
            })
            .collect()
    }

    /// Face permutation: the dart that follows `d` along its face.
    pub fn face_next(&self, d: DartId) -> DartId {
        self.succ[twin(d)]
    }

    pub fn trace_faces(&self) -> FaceSet {
        let mut seen = vec![false; self.succ.len()];
        let mut faces = Vec::new();
        for start in 0..self.succ.len() {
            if seen[start] {
                continue;
            }
            let mut face = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                face.push(d);
                d = self.face_next(d);
            }
            debug_assert_eq!(d, start, "face walks are closed");
            faces.push(face);
        }
        FaceSet { faces }
    }

    pub fn num_faces(&self) -> usize {
        if self.succ.is_empty() {
            return 1;
        }
        self.trace_faces().len()
    }

    fn is_connected(&self) -> bool {
        let n = self.num_vertices;
        if n == 0 {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut comps = n;
        for d in (0..self.succ.len()).step_by(2) {
            let (a, b) = (find(&mut parent, self.tail[d]), find(&mut parent, self.tail[d + 1]));
            if a != b {
                parent[a] = b;
                comps -= 1;
            }
        }
        comps == 1
    }

    /// Orientable genus via Euler's formula; the graph must be connected.
    pub fn genus(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let v = self.num_vertices as i64;
        let e = self.num_edges() as i64;
        let f = self.num_faces() as i64;
        let twice = 2 - v + e - f;
        debug_assert!(twice >= 0 && twice % 2 == 0, "Euler characteristic parity");
        Ok((twice / 2) as usize)
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.genus(), Ok(0))
    }

    /// Reverses every cyclic order (mirror image).
    pub fn invert(&self) -> Self {
        let mut pred = vec![0; self.succ.len()];
        for (d, &s) in self.succ.iter().enumerate() {
            pred[s] = d;
        }
        RotationSystem {
            succ: pred,
            tail: self.tail.clone(),
            num_vertices: self.num_vertices,
        }
    }

    /// Re-labels `rs` by a dart permutation `map` (old dart -> new dart).
    pub(crate) fn conjugate(&self, map: &[DartId]) -> Self {
        let mut succ = vec![0; self.succ.len()];
        let mut tail = vec![0; self.succ.len()];
        for d in 0..self.succ.len() {
            succ[map[d]] = map[self.succ[d]];
            tail[map[d]] = self.tail[d];
        }
        RotationSystem {
            succ,
            tail,
            num_vertices: self.num_vertices,
        }
    }

    /// `r <v>: <dart> <dart> ...`, one line per vertex.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, order) in self.cyclic_orders().iter().enumerate() {
            write!(out, "r {v}:").unwrap();
            for d in order {
                write!(out, " {d}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(g: &MultiGraph, text: &str) -> Result<Self> {
        let mut orders: Vec<Option<Vec<DartId>>> = vec![None; g.num_vertices()];
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: lineno, msg };
            let rest = content
                .strip_prefix("r ")
                .ok_or_else(|| bad("expected `r <v>: ...`".into()))?;
            let (vertex, darts) = rest
                .split_once(':')
                .ok_or_else(|| bad("missing `:`".into()))?;
            let v: VertexId = vertex
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad vertex `{vertex}`")))?;
            if v >= g.num_vertices() {
                return Err(bad(format!("vertex {v} out of range")));
            }
            let order = darts
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| bad(format!("bad dart `{s}`"))))
                .collect::<Result<Vec<DartId>>>()?;
            if orders[v].replace(order).is_some() {
                return Err(bad(format!("vertex {v} listed twice")));
            }
        }
        let orders: Vec<Vec<DartId>> = orders.into_iter().map(Option::unwrap_or_default).collect();
        Self::from_cyclic_orders(g, &orders)
    }
}

/// Checks that the darts of `bundle` at `v` form one contiguous arc of the
/// rotation at `v`.
fn is_consecutive(rs: &RotationSystem, darts: &[DartId]) -> bool {
    if darts.len() <= 1 {
        return true;
    }
    let member = |d: DartId| darts.contains(&d);
    let order = rs.rotation_at(rs.tail(darts[0]));
    if order.len() == darts.len() {
        return true;
    }
    let boundaries = (0..order.len())
        .filter(|&i| member(order[i]) && !member(order[(i + 1) % order.len()]))
        .count();
    boundaries == 1
}

/// Permutes the edges inside every parallel bundle by an independent
/// uniform permutation, applied at both endpoints.
///
/// Swapping the labels of parallel edges is a vertex-fixing automorphism of
/// the underlying graph, so consecutiveness and genus are preserved.
pub fn randomize_bundles(g: &MultiGraph, rs: &RotationSystem, seed: u64) -> Result<RotationSystem> {
    let mut rng = rng_for(seed, "bundles", 0);
    let mut map: Vec<DartId> = (0..g.num_darts()).collect();
    for bundle in g.bundles() {
        if bundle.len() < 2 {
            continue;
        }
        let (u, v) = g.endpoints(bundle[0]);
        for w in [u, v] {
            let darts: Vec<DartId> = bundle.iter().map(|&e| g.dart_at(e, w).unwrap()).collect();
            if !is_consecutive(rs, &darts) {
                return Err(Error::BundleNotConsecutive(bundle.clone()));
            }
        }
        let mut image = bundle.clone();
        image.shuffle(&mut rng);
        for (&from, &to) in bundle.iter().zip(&image) {
            for w in [u, v] {
                map[g.dart_at(from, w).unwrap()] = g.dart_at(to, w).unwrap();
            }
        }
    }
    Ok(rs.conjugate(&map))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> MultiGraph {
        MultiGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn k4() -> MultiGraph {
        MultiGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    /// All rotation systems of a small graph by brute force.
    fn all_rotations(g: &MultiGraph) -> Vec<RotationSystem> {
        fn perms(items: &[DartId]) -> Vec<Vec<DartId>> {
            if items.len() <= 2 {
                return vec![items.to_vec()];
            }
            let (first, rest) = items.split_first().unwrap();
            let mut out = Vec::new();
            let mut rest = rest.to_vec();
            permute(&mut rest, 0, &mut |p| {
                let mut v = vec![*first];
                v.extend_from_slice(p);
                out.push(v);
            });
            out
        }
        fn permute(a: &mut Vec<DartId>, k: usize, f: &mut dyn FnMut(&[DartId])) {
            if k == a.len() {
                f(a);
                return;
            }
            for i in k..a.len() {
                a.swap(k, i);
                permute(a, k + 1, f);
                a.swap(k, i);
            }
        }
        let choices: Vec<Vec<Vec<DartId>>> =
            (0..g.num_vertices()).map(|v| perms(g.darts_at(v))).collect();
        let mut out = Vec::new();
        let mut idx = vec![0; choices.len()];
        loop {
            let orders: Vec<Vec<DartId>> =
                idx.iter().enumerate().map(|(v, &i)| choices[v][i].clone()).collect();
            out.push(RotationSystem::from_cyclic_orders(g, &orders).unwrap());
            let mut v = 0;
            loop {
                if v == idx.len() {
                    return out;
                }
                idx[v] += 1;
                if idx[v] < choices[v].len() {
                    break;
                }
                idx[v] = 0;
                v += 1;
            }
        }
    }

    #[test]
    fn triangle_faces() {
        let rs = RotationSystem::incidence_order(&triangle());
        let faces = rs.trace_faces();
        assert_eq!(faces.length_profile(), vec![3, 3]);
        assert_eq!(rs.genus().unwrap(), 0);
    }

    #[test]
    fn digon_faces() {
        let g = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let rs = RotationSystem::incidence_order(&g);
        assert_eq!(rs.trace_faces().length_profile(), vec![2, 2]);
    }

    #[test]
    fn k4_rotation_census() {
        let all = all_rotations(&k4());
        assert_eq!(all.len(), 16);
        let planar: Vec<_> = all.iter().filter(|rs| rs.genus().unwrap() == 0).collect();
        assert_eq!(planar.len(), 2);
        assert_eq!(planar[0].invert(), *planar[1]);
        assert_eq!(planar[0].trace_faces().length_profile(), vec![3, 3, 3, 3]);
        assert!(all.iter().any(|rs| rs.genus().unwrap() == 1));
    }

    #[test]
    fn k5_is_never_planar() {
        let mut edges = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((u, v));
            }
        }
        let g = MultiGraph::from_edges(5, &edges).unwrap();
        // 6^5 systems; check a deterministic slice
        for rs in all_rotations(&g).iter().step_by(97) {
            assert!(rs.genus().unwrap() >= 1);
        }
    }

    #[test]
    fn inversion_on_low_degree_is_identity() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let rs = RotationSystem::incidence_order(&g);
        assert_eq!(rs.invert(), rs);
        assert_eq!(rs.invert().invert(), rs);
    }

    #[test]
    fn disconnected_genus_is_error() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let rs = RotationSystem::incidence_order(&g);
        assert!(matches!(rs.genus(), Err(Error::Disconnected)));
        let single = MultiGraph::new(1);
        assert_eq!(RotationSystem::incidence_order(&single).genus().unwrap(), 0);
    }

    #[test]
    fn malformed_orders_are_rejected() {
        let g = triangle();
        assert!(RotationSystem::from_cyclic_orders(&g, &[vec![0], vec![1, 2], vec![3, 5]]).is_err());
        assert!(RotationSystem::from_cyclic_orders(&g, &[vec![0, 0], vec![1, 2], vec![3, 4]]).is_err());
    }

    #[test]
    fn bundle_randomization() {
        let theta = MultiGraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let rs = RotationSystem::from_cyclic_orders(&theta, &[vec![0, 2, 4], vec![5, 3, 1]]).unwrap();
        assert_eq!(rs.genus().unwrap(), 0);
        let a = randomize_bundles(&theta, &rs, 7).unwrap();
        let b = randomize_bundles(&theta, &rs, 7).unwrap();
        assert_eq!(a, b);
        let mut seen = std::collections::HashSet::new();
        for seed in 0..200 {
            let out = randomize_bundles(&theta, &rs, seed).unwrap();
            assert_eq!(out.genus().unwrap(), 0);
            seen.insert(out.to_text());
        }
        // 3! labelings of the bundle, fixed by the rotation at vertex 0 up to
        // its cyclic symmetry: 2 distinct cyclic orders
        assert_eq!(seen.len(), 2);

        let simple = triangle();
        let rs = RotationSystem::incidence_order(&simple);
        assert_eq!(randomize_bundles(&simple, &rs, 3).unwrap(), rs);
    }

    #[test]
    fn non_consecutive_bundle_is_rejected() {
        // square 0-1-2-3 with a doubled edge 0-1 split around vertex 0
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 1), (0, 2)])
            .unwrap();
        let orders = vec![vec![0, 7, 8, 10], vec![1, 2, 9], vec![3, 4, 11], vec![5, 6]];
        let rs = RotationSystem::from_cyclic_orders(&g, &orders).unwrap();
        assert!(matches!(
            randomize_bundles(&g, &rs, 1),
            Err(Error::BundleNotConsecutive(_))
        ));
    }

    #[test]
    fn file_round_trip() {
        let g = k4();
        let rs = all_rotations(&g).into_iter().find(|r| r.is_planar()).unwrap();
        let text = rs.to_text();
        assert!(text.starts_with("r 0: 0 "));
        let back = RotationSystem::parse(&g, &text).unwrap();
        assert_eq!(back, rs);
        assert_eq!(back.to_text(), text);
    }
}
