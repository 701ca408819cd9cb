//! Planarity testing with planar rotation systems, Kuratowski witnesses,
//! and a brute-force Whitney uniqueness check for small 3-connected graphs.
//!
//! Blocks of the simplification are embedded by path addition
//! (Demoucron, Malgrange and Pertuiset). Rotations of blocks are
//! concatenated at cutvertices, and parallel copies of an edge are inserted
//! next to their representative so that every bundle stays consecutive.

use rand::Rng;

use crate::error::{Error, Result};
use crate::multigraph::{is_k_connected, lowpoint, twin, DartId, EdgeId, MultiGraph, VertexId};
use crate::rotation::{randomize_bundles, RotationSystem};
use crate::seed::{derive_seed, rng_for};

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct EmbeddingResult {
    /// A planar rotation when `planar`, otherwise the incidence-order rotation.
    pub rs: RotationSystem,
    pub planar: bool,
    /// Edge ids of a Kuratowski subdivision when not planar.
    pub witness: Option<Vec<EdgeId>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObstructionKind {
    K5,
    K33,
}

/// How the mirror-image ambiguity of 3-connected blocks is resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Chirality {
    /// Keep the orientation produced by the deterministic embedder.
    Fix,
    /// Pick each orientation with probability 1/2.
    #[default]
    Coin,
}

/// Path-addition embedding of a simple 2-connected graph with at least
/// 3 vertices. Returns the successor array over its darts.
fn embed_biconnected(b: &MultiGraph) -> Option<Vec<DartId>> {
    let n = b.num_vertices();
    let m = b.num_edges();
    if m > 3 * n - 6 {
        return None;
    }
    let mut in_v = vec![false; n];
    let mut in_e = vec![false; m];
    let mut succ = vec![NONE; 2 * m];
    let mut pred = vec![NONE; 2 * m];

    let (cycle_vertices, cycle_edges) = find_cycle(b);
    let k = cycle_vertices.len();
    for i in 0..k {
        let v = cycle_vertices[i];
        in_v[v] = true;
        in_e[cycle_edges[i]] = true;
        let out = b.dart_at(cycle_edges[i], v).unwrap();
        let back = b.dart_at(cycle_edges[(i + k - 1) % k], v).unwrap();
        succ[out] = back;
        succ[back] = out;
        pred[out] = back;
        pred[back] = out;
    }
    let mut placed = k;

    let insert_before = |succ: &mut Vec<DartId>, pred: &mut Vec<DartId>, new: DartId, at: DartId| {
        let p = pred[at];
        succ[p] = new;
        pred[new] = p;
        succ[new] = at;
        pred[at] = new;
    };

    let mut face_of = vec![NONE; 2 * m];
    let mut comp = vec![NONE; n];
    let mut counter: Vec<usize> = Vec::new();
    let mut prev: Vec<(VertexId, EdgeId)> = vec![(NONE, NONE); n];

    while placed < m {
        // faces of the current embedded subgraph
        face_of.fill(NONE);
        let mut faces: Vec<Vec<DartId>> = Vec::new();
        for d in 0..2 * m {
            if !in_e[d / 2] || face_of[d] != NONE {
                continue;
            }
            let id = faces.len();
            let mut walk = Vec::new();
            let mut x = d;
            while face_of[x] == NONE {
                face_of[x] = id;
                walk.push(x);
                x = succ[twin(x)];
            }
            faces.push(walk);
        }
        counter.clear();
        counter.resize(faces.len(), 0);

        // fragments: chords and components of the unembedded vertices
        comp.fill(NONE);
        let mut fragments: Vec<(Vec<VertexId>, Option<usize>, Option<EdgeId>)> = Vec::new();
        for (e, u, v) in b.edges() {
            if !in_e[e] && in_v[u] && in_v[v] {
                fragments.push((vec![u, v], None, Some(e)));
            }
        }
        let mut ncomp = 0;
        for s in 0..n {
            if in_v[s] || comp[s] != NONE {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = ncomp;
            let mut attachments = Vec::new();
            while let Some(x) = stack.pop() {
                for (_, w) in b.neighbors(x) {
                    if in_v[w] {
                        attachments.push(w);
                    } else if comp[w] == NONE {
                        comp[w] = ncomp;
                        stack.push(w);
                    }
                }
            }
            attachments.sort_unstable();
            attachments.dedup();
            fragments.push((attachments, Some(ncomp), None));
            ncomp += 1;
        }

        // admissible faces per fragment
        // a fragment with a single admissible face is placed first
        let mut choice: Option<(usize, usize)> = None;
        let mut forced = false;
        for (i, (attachments, _, _)) in fragments.iter().enumerate() {
            let mut admissible = Vec::new();
            for &a in attachments {
                for &d in b.darts_at(a) {
                    if in_e[d / 2] {
                        let f = face_of[d];
                        counter[f] += 1;
                        if counter[f] == attachments.len() {
                            admissible.push(f);
                        }
                    }
                }
            }
            for &a in attachments {
                for &d in b.darts_at(a) {
                    if in_e[d / 2] {
                        counter[face_of[d]] = 0;
                    }
                }
            }
            match admissible.len() {
                0 => return None,
                1 if !forced => {
                    choice = Some((i, admissible[0]));
                    forced = true;
                }
                _ if choice.is_none() => {
                    choice = admissible.iter().min().map(|&f| (i, f));
                }
                _ => {}
            }
        }
        let (fi, face) = choice.expect("at least one fragment remains");
        let (attachments, component, chord) = &fragments[fi];

        // path through the fragment between two distinct attachments
        let (path_vertices, path_edges) = match (component, chord) {
            (None, Some(e)) => (attachments.clone(), vec![*e]),
            (Some(c), None) => {
                let a = attachments[0];
                let mut queue = std::collections::VecDeque::new();
                let mut seen = vec![false; n];
                for (e, w) in b.neighbors(a) {
                    if comp[w] == *c && !seen[w] {
                        seen[w] = true;
                        prev[w] = (a, e);
                        queue.push_back(w);
                    }
                }
                let mut end = None;
                'bfs: while let Some(x) = queue.pop_front() {
                    for (e, w) in b.neighbors(x) {
                        if in_v[w] && w != a {
                            end = Some((x, e, w));
                            break 'bfs;
                        }
                        if !in_v[w] && !seen[w] {
                            seen[w] = true;
                            prev[w] = (x, e);
                            queue.push_back(w);
                        }
                    }
                }
                let (last, last_edge, target) = end.expect("blocks are 2-connected");
                let mut verts = vec![target, last];
                let mut edges = vec![last_edge];
                let mut x = last;
                while x != a {
                    let (p, e) = prev[x];
                    edges.push(e);
                    verts.push(p);
                    x = p;
                }
                verts.reverse();
                edges.reverse();
                (verts, edges)
            }
            _ => unreachable!(),
        };

        let a = path_vertices[0];
        let z = *path_vertices.last().unwrap();
        let at_a = *faces[face].iter().find(|&&d| b.dart_tail(d) == a).unwrap();
        let at_z = *faces[face].iter().find(|&&d| b.dart_tail(d) == z).unwrap();
        let first = b.dart_at(path_edges[0], a).unwrap();
        let last = b.dart_at(*path_edges.last().unwrap(), z).unwrap();
        insert_before(&mut succ, &mut pred, first, at_a);
        insert_before(&mut succ, &mut pred, last, at_z);
        for i in 1..path_vertices.len() - 1 {
            let v = path_vertices[i];
            let x = b.dart_at(path_edges[i - 1], v).unwrap();
            let y = b.dart_at(path_edges[i], v).unwrap();
            succ[x] = y;
            succ[y] = x;
            pred[x] = y;
            pred[y] = x;
            in_v[v] = true;
        }
        for &e in &path_edges {
            in_e[e] = true;
        }
        placed += path_edges.len();
    }
    Some(succ)
}

/// Any cycle of a graph with minimum degree 2, as parallel vertex and edge
/// lists where `edges[i]` joins `vertices[i]` and `vertices[i + 1]`.
fn find_cycle(b: &MultiGraph) -> (Vec<VertexId>, Vec<EdgeId>) {
    let n = b.num_vertices();
    let mut parent: Vec<(VertexId, EdgeId)> = vec![(NONE, NONE); n];
    let mut depth = vec![NONE; n];
    let mut stack = vec![(0usize, 0usize)];
    depth[0] = 0;
    while let Some(&mut (v, ref mut i)) = stack.last_mut() {
        let darts = b.darts_at(v);
        if *i == darts.len() {
            stack.pop();
            continue;
        }
        let d = darts[*i];
        *i += 1;
        let e = d / 2;
        if parent[v].1 == e {
            continue;
        }
        let w = b.dart_head(d);
        if depth[w] == NONE {
            depth[w] = depth[v] + 1;
            parent[w] = (v, e);
            stack.push((w, 0));
        } else if depth[w] < depth[v] {
            // back edge v -> ancestor w
            let mut vertices = vec![w];
            let mut edges = vec![];
            let mut chain = Vec::new();
            let mut x = v;
            while x != w {
                chain.push((x, parent[x].1));
                x = parent[x].0;
            }
            for &(x, pe) in chain.iter().rev() {
                edges.push(pe);
                vertices.push(x);
            }
            edges.push(e);
            return (vertices, edges);
        }
    }
    panic!("graph has no cycle")
}

/// Embeds a simple graph block by block. On failure returns the edges of a
/// non-planar block.
fn embed_simple(s: &MultiGraph) -> std::result::Result<Vec<Vec<DartId>>, Vec<EdgeId>> {
    let mut orders: Vec<Vec<DartId>> = vec![Vec::new(); s.num_vertices()];
    let mut blocks = lowpoint(s, None).blocks;
    for block in &mut blocks {
        block.sort_unstable();
    }
    blocks.sort();
    for block in &blocks {
        let sub = s.edge_subgraph(block);
        let local = &sub.graph;
        let to_global = |d: DartId| 2 * sub.edge_origin[d / 2] + (d & 1);
        if local.num_vertices() <= 2 {
            for (e, u, v) in local.edges() {
                orders[sub.vertex_origin[u]].push(to_global(2 * e));
                orders[sub.vertex_origin[v]].push(to_global(2 * e + 1));
            }
            continue;
        }
        let Some(succ) = embed_biconnected(local) else {
            return Err(sub.edge_origin.clone());
        };
        for v in 0..local.num_vertices() {
            let start = local.darts_at(v)[0];
            let mut d = start;
            loop {
                orders[sub.vertex_origin[v]].push(to_global(d));
                d = succ[d];
                if d == start {
                    break;
                }
            }
        }
    }
    Ok(orders)
}

fn is_planar_simple(s: &MultiGraph) -> bool {
    embed_simple(s).is_ok()
}

/// Shrinks a non-planar edge set of a simple graph to an inclusion-minimal
/// non-planar subset, which is a Kuratowski subdivision.
fn minimal_nonplanar(s: &MultiGraph, edges: &[EdgeId]) -> Vec<EdgeId> {
    let test = |keep: &[EdgeId]| !is_planar_simple(&s.edge_subgraph(keep).graph);
    let mut current = edges.to_vec();
    let mut chunk = (current.len() / 2).max(1);
    loop {
        let mut i = 0;
        while i < current.len() {
            let end = (i + chunk).min(current.len());
            let trial: Vec<EdgeId> = current[..i].iter().chain(&current[end..]).copied().collect();
            if test(&trial) {
                current = trial;
            } else {
                i = end;
            }
        }
        if chunk == 1 {
            break;
        }
        chunk /= 2;
    }
    current
}

/// Classifies a Kuratowski subdivision by its branch vertices.
pub fn classify_obstruction(g: &MultiGraph, witness: &[EdgeId]) -> Option<ObstructionKind> {
    let sub = g.edge_subgraph(witness);
    let degrees: Vec<usize> = (0..sub.graph.num_vertices())
        .map(|v| sub.graph.degree(v))
        .filter(|&d| d >= 3)
        .collect();
    match (degrees.len(), degrees.iter().all(|&d| d == 4), degrees.iter().all(|&d| d == 3)) {
        (5, true, _) => Some(ObstructionKind::K5),
        (6, _, true) => Some(ObstructionKind::K33),
        _ => None,
    }
}

/// Planar rotation system of a connected multigraph, or a Kuratowski witness.
pub fn planar_embed(g: &MultiGraph) -> Result<EmbeddingResult> {
    if g.num_vertices() == 0 {
        return Err(Error::Empty("graph has no vertices"));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let simple = g.simplify();
    let s = &simple.graph;
    let to_g = |d: DartId| 2 * simple.representative[d / 2] + (d & 1);
    let orders = match embed_simple(s) {
        Ok(orders) => orders,
        Err(block) => {
            let witness: Vec<EdgeId> = minimal_nonplanar(s, &block)
                .into_iter()
                .map(|e| simple.representative[e])
                .collect();
            return Ok(EmbeddingResult {
                rs: RotationSystem::incidence_order(g),
                planar: false,
                witness: Some(witness),
            });
        }
    };
    let mut orders: Vec<Vec<DartId>> = orders
        .into_iter()
        .map(|o| o.into_iter().map(to_g).collect())
        .collect();
    for bundle in g.bundles() {
        let r = bundle[0];
        let (u, v) = g.endpoints(r);
        for &p in &bundle[1..] {
            let at_u = orders[u].iter().position(|&d| d == 2 * r).unwrap();
            orders[u].insert(at_u, 2 * p);
            let at_v = orders[v].iter().position(|&d| d == 2 * r + 1).unwrap();
            orders[v].insert(at_v + 1, 2 * p + 1);
        }
    }
    let rs = RotationSystem::from_cyclic_orders(g, &orders)?;
    debug_assert_eq!(rs.genus().ok(), Some(0));
    Ok(EmbeddingResult {
        rs,
        planar: true,
        witness: None,
    })
}

/// Whether the simplification of `g` is planar.
pub fn is_planar(g: &MultiGraph) -> bool {
    is_planar_simple(&g.simplify().graph)
}

fn count_faces(succ: &[DartId], seen: &mut [bool]) -> usize {
    seen.fill(false);
    let mut faces = 0;
    for start in 0..succ.len() {
        if seen[start] {
            continue;
        }
        faces += 1;
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            d = succ[twin(d)];
        }
    }
    faces
}

/// Enumerates every rotation system of the simplification of `g` and
/// reports whether exactly two are planar and they are mirror images.
pub fn whitney_check(g: &MultiGraph) -> Result<bool> {
    let s = g.simplify().graph;
    let (n, m) = (s.num_vertices(), s.num_edges());
    if n > 8 && m > 14 {
        return Err(Error::GuardExceeded(format!(
            "{n} vertices and {m} edges (limit: 8 vertices or 14 edges)"
        )));
    }
    if !is_k_connected(&s, 3) {
        return Err(Error::NotKConnected(3));
    }
    let mut total: f64 = 1.0;
    for v in 0..n {
        total *= (1..s.degree(v)).map(|k| k as f64).product::<f64>();
    }
    if total > 5e7 {
        return Err(Error::GuardExceeded(format!("{total} rotation systems")));
    }

    // per vertex: all cyclic orders with the first dart fixed
    let choices: Vec<Vec<Vec<DartId>>> = (0..n)
        .map(|v| {
            let darts = s.darts_at(v);
            let mut rest = darts[1..].to_vec();
            let mut out = Vec::new();
            heap_permutations(&mut rest, &mut |p| {
                let mut order = vec![darts[0]];
                order.extend_from_slice(p);
                out.push(order);
            });
            out
        })
        .collect();

    let target_faces = 2 + m - n;
    let mut succ = vec![0; 2 * m];
    let mut seen = vec![false; 2 * m];
    let mut idx = vec![0usize; n];
    let mut planar: Vec<Vec<usize>> = Vec::new();
    let set_vertex = |succ: &mut [DartId], order: &[DartId]| {
        for i in 0..order.len() {
            succ[order[i]] = order[(i + 1) % order.len()];
        }
    };
    for v in 0..n {
        set_vertex(&mut succ, &choices[v][0]);
    }
    'outer: loop {
        if count_faces(&succ, &mut seen) == target_faces {
            planar.push(idx.clone());
            if planar.len() > 2 {
                return Ok(false);
            }
        }
        let mut v = 0;
        loop {
            if v == n {
                break 'outer;
            }
            idx[v] += 1;
            if idx[v] < choices[v].len() {
                set_vertex(&mut succ, &choices[v][idx[v]]);
                break;
            }
            idx[v] = 0;
            set_vertex(&mut succ, &choices[v][0]);
            v += 1;
        }
    }
    if planar.len() != 2 {
        return Ok(false);
    }
    let build = |pick: &[usize]| {
        let orders: Vec<Vec<DartId>> = (0..n).map(|v| choices[v][pick[v]].clone()).collect();
        RotationSystem::from_cyclic_orders(&s, &orders).unwrap()
    };
    Ok(build(&planar[0]).invert() == build(&planar[1]))
}

/// Calls `f` on every permutation of `items` (Heap's algorithm).
pub(crate) fn heap_permutations<T: Clone>(items: &mut [T], f: &mut dyn FnMut(&[T])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    f(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// One of the two planar embeddings of a graph whose simplification is
/// 3-connected, each with probability 1/2, with bundles shuffled uniformly.
pub fn uniform_planar_embedding(g: &MultiGraph, seed: u64) -> Result<RotationSystem> {
    if !is_k_connected(&g.simplify().graph, 3) {
        return Err(Error::NotKConnected(3));
    }
    let result = planar_embed(g)?;
    if !result.planar {
        return Err(Error::NonPlanar(result.witness.unwrap_or_default()));
    }
    let flip = rng_for(seed, "chirality", 0).gen_bool(0.5);
    let rs = if flip { result.rs.invert() } else { result.rs };
    randomize_bundles(g, &rs, derive_seed(seed, "bundles", 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn k4_and_octahedron() {
        let res = planar_embed(&generators::complete(4)).unwrap();
        assert!(res.planar);
        assert_eq!(res.rs.trace_faces().len(), 4);
        let res = planar_embed(&generators::octahedron()).unwrap();
        assert!(res.planar);
        assert_eq!(res.rs.trace_faces().length_profile(), vec![3; 8]);
    }

    #[test]
    fn kuratowski_witnesses() {
        let k5 = generators::complete(5);
        let res = planar_embed(&k5).unwrap();
        assert!(!res.planar);
        let w = res.witness.unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(classify_obstruction(&k5, &w), Some(ObstructionKind::K5));

        let k33 = generators::complete_bipartite(3, 3);
        let res = planar_embed(&k33).unwrap();
        let w = res.witness.unwrap();
        assert_eq!(w.len(), 9);
        assert_eq!(classify_obstruction(&k33, &w), Some(ObstructionKind::K33));

        // Petersen graph contains a K3,3 subdivision but no K5 subdivision
        let pet = generators::petersen();
        let res = planar_embed(&pet).unwrap();
        let w = res.witness.unwrap();
        assert!(!is_planar(&pet.edge_subgraph(&w).graph));
        assert_eq!(classify_obstruction(&pet, &w), Some(ObstructionKind::K33));
    }

    #[test]
    fn multigraph_bundles_stay_consecutive() {
        let mut g = generators::prism();
        g.add_edge(0, 1).unwrap();
        g.add_edge(0, 1).unwrap();
        g.add_edge(3, 4).unwrap();
        let res = planar_embed(&g).unwrap();
        assert!(res.planar);
        assert_eq!(res.rs.genus().unwrap(), 0);
        assert!(randomize_bundles(&g, &res.rs, 5).is_ok());
    }

    #[test]
    fn cut_vertices_and_bridges() {
        // two triangles sharing a vertex plus a pendant path
        let g = MultiGraph::from_edges(7, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (4, 5), (5, 6)])
            .unwrap();
        let res = planar_embed(&g).unwrap();
        assert!(res.planar);
        assert_eq!(res.rs.genus().unwrap(), 0);
        let single = MultiGraph::new(1);
        assert!(planar_embed(&single).unwrap().planar);
    }

    #[test]
    fn whitney() {
        assert!(whitney_check(&generators::complete(4)).unwrap());
        assert!(whitney_check(&generators::prism()).unwrap());
        assert!(whitney_check(&generators::cube()).unwrap());
        assert!(matches!(
            whitney_check(&generators::cycle(5)),
            Err(Error::NotKConnected(3))
        ));
        assert!(matches!(
            whitney_check(&generators::icosahedron()),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn uniform_chirality_is_fair() {
        let g = generators::complete(4);
        let base = planar_embed(&g).unwrap().rs;
        let mut same = 0;
        for seed in 0..2000 {
            let rs = uniform_planar_embedding(&g, seed).unwrap();
            if rs == base {
                same += 1;
            } else {
                assert_eq!(rs, base.invert());
            }
        }
        let freq = same as f64 / 2000.0;
        assert!((0.45..=0.55).contains(&freq), "{freq}");
    }

    #[test]
    fn uniform_embedding_with_tripled_edge() {
        let mut g = generators::prism();
        g.add_edge(0, 1).unwrap();
        g.add_edge(0, 1).unwrap();
        for seed in 0..20 {
            let rs = uniform_planar_embedding(&g, seed).unwrap();
            assert_eq!(rs.genus().unwrap(), 0);
            assert!(randomize_bundles(&g, &rs, 0).is_ok());
        }
    }

    #[test]
    fn heap_enumerates_all() {
        let mut items = vec![0, 1, 2, 3];
        let mut all = std::collections::HashSet::new();
        heap_permutations(&mut items, &mut |p| {
            all.insert(p.to_vec());
        });
        assert_eq!(all.len(), 24);
    }
}

#[cfg(test)]
mod scale_tests {
    use super::*;
    use crate::generators;

    #[test]
    fn large_triangulation_embeds() {
        let g = generators::random_triangulation(500, 11);
        let start = std::time::Instant::now();
        let res = planar_embed(&g).unwrap();
        assert!(res.planar);
        assert_eq!(res.rs.genus().unwrap(), 0);
        assert!(start.elapsed().as_secs_f64() < 5.0);
        let torus = generators::torus_triangulation(6, 5);
        assert!(!planar_embed(&torus).unwrap().planar);
    }
}
