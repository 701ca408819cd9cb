//! Factor graphs, decomposing subgraphs and the independent sets `I_R` on
//! finite graphs.

use rustc_hash::FxHashMap;

use crate::multigraph::{EdgeId, MultiGraph, VertexId};
use crate::seed::hash_label;

/// Components of `g - removed` joined when some edge of `g` runs between
/// them. `edges` holds `(a, b, multiplicity)` with `a < b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorGraph {
    pub component: Vec<usize>,
    pub num_components: usize,
    pub edges: Vec<(usize, usize, usize)>,
}

impl FactorGraph {
    pub fn is_forest(&self) -> bool {
        is_forest(self.num_components, self.edges.iter().map(|&(a, b, _)| (a, b)))
    }
}

/// Acyclicity of the simple graph on `n` nodes spanned by `edges`; repeated
/// pairs and loops are ignored.
pub(crate) fn is_forest(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    let mut pairs: Vec<(usize, usize)> =
        edges.filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))).collect();
    pairs.sort_unstable();
    pairs.dedup();
    for (a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

pub fn factor_graph(g: &MultiGraph, removed: &[EdgeId]) -> FactorGraph {
    let mut gone = vec![false; g.num_edges()];
    for &e in removed {
        gone[e] = true;
    }
    let (component, num_components) = g.components_filtered(|e| !gone[e]);
    let mut counts: FxHashMap<(usize, usize), usize> = FxHashMap::default();
    for &e in removed {
        let (u, v) = g.endpoints(e);
        let (a, b) = (component[u], component[v]);
        if a != b {
            *counts.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut edges: Vec<(usize, usize, usize)> = counts.into_iter().map(|((a, b), k)| (a, b, k)).collect();
    edges.sort_unstable();
    FactorGraph {
        component,
        num_components,
        edges,
    }
}

/// On a finite graph inter-component edge counts are always finite, so this
/// is the forest condition on the factor graph.
pub fn is_decomposing(g: &MultiGraph, removed: &[EdgeId]) -> bool {
    factor_graph(g, removed).is_forest()
}

/// Vertices of `window` whose label beats every other vertex within
/// distance `2r` in `g`; labels are iid uniform under `seed`.
pub fn sample_i_r(g: &MultiGraph, window: &[VertexId], r: usize, seed: u64) -> Vec<VertexId> {
    let label = |v: VertexId| (hash_label(seed, &(v as u64)), v);
    window
        .iter()
        .copied()
        .filter(|&x| {
            let lx = label(x);
            g.bfs_limited(x, 2 * r, |_| true)
                .iter()
                .enumerate()
                .all(|(y, d)| y == x || d.is_none() || label(y) < lx)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, grid, path};

    fn theta() -> MultiGraph {
        // 4-cycle with the chord 0-2
        MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap()
    }

    #[test]
    fn trivial_cases() {
        let c = cycle(6);
        assert!(is_decomposing(&c, &[]));
        assert_eq!(factor_graph(&c, &[]).num_components, 1);
        assert!(is_decomposing(&c, &[2]));
        let f = factor_graph(&c, &[0, 3]);
        assert_eq!(f.num_components, 2);
        assert_eq!(f.edges, vec![(0, 1, 2)]);
        assert!(f.is_forest());
    }

    #[test]
    fn theta_chain() {
        let t = theta();
        assert!(is_decomposing(&t, &[4]));
        // then cut vertex 1 off the remaining 4-cycle
        assert!(is_decomposing(&t, &[4, 0, 1]));
        // removing everything around vertex 0 and 2 leaves a factor cycle
        let f = factor_graph(&t, &[0, 1, 2, 3, 4]);
        assert_eq!(f.num_components, 4);
        assert!(!f.is_forest());
    }

    /// Every chain `removed1 ⊆ removed2` over the edge sets of `g` where each
    /// step is decomposing relative to the previous graph; returns the number
    /// of chains and of chains whose composition is not decomposing in `g`.
    fn composition_census(g: &MultiGraph) -> (usize, usize) {
        let m = g.num_edges();
        let (mut chains, mut failures) = (0, 0);
        for first in 0u32..1 << m {
            let a: Vec<EdgeId> = (0..m).filter(|&e| first >> e & 1 == 1).collect();
            if !is_decomposing(g, &a) {
                continue;
            }
            let kept: Vec<EdgeId> = (0..m).filter(|&e| first >> e & 1 == 0).collect();
            let h = g.edge_subgraph(&kept);
            for second in 0u32..1 << kept.len() {
                let b: Vec<EdgeId> = (0..kept.len()).filter(|&i| second >> i & 1 == 1).collect();
                if !is_decomposing(&h.graph, &b) {
                    continue;
                }
                chains += 1;
                let mut all = a.clone();
                all.extend(b.iter().map(|&i| h.edge_origin[i]));
                if !is_decomposing(g, &all) {
                    failures += 1;
                }
            }
        }
        (chains, failures)
    }

    #[test]
    fn composition_of_decomposing_subgraphs() {
        // paths and trees: every removal set is decomposing, so composition holds
        assert_eq!(composition_census(&path(5)).1, 0);
        // on a triangle, cutting one vertex off and then splitting the
        // remaining edge makes the factor graph a triangle
        let tri = cycle(3);
        let (chains, failures) = composition_census(&tri);
        assert!(chains > 0 && failures > 0);
        assert!(is_decomposing(&tri, &[0, 2]));
        let rest = tri.edge_subgraph(&[1]);
        assert!(is_decomposing(&rest.graph, &[0]));
        assert!(!is_decomposing(&tri, &[0, 1, 2]));
        let (theta_chains, theta_failures) = composition_census(&theta());
        assert!(theta_chains > theta_failures && theta_failures > 0);
    }

    #[test]
    fn i_r_examples() {
        let single = MultiGraph::new(1);
        assert_eq!(sample_i_r(&single, &[0], 1, 7), vec![0]);
        let p = path(3);
        for seed in 0..20 {
            let chosen = sample_i_r(&p, &[0, 1, 2], 1, seed);
            assert_eq!(chosen.len(), 1);
            let best = (0..3)
                .max_by(|&a, &b| hash_label(seed, &(a as u64)).total_cmp(&hash_label(seed, &(b as u64))))
                .unwrap();
            assert_eq!(chosen, vec![best]);
        }
    }

    #[test]
    fn i_r_is_independent_on_large_grid() {
        let g = grid(40, 25);
        assert_eq!(g.num_vertices(), 1000);
        let window: Vec<VertexId> = (0..1000).collect();
        for seed in 0..3 {
            let chosen = sample_i_r(&g, &window, 1, seed);
            assert!(!chosen.is_empty());
            for (i, &a) in chosen.iter().enumerate() {
                let d = g.bfs_distances(a);
                for &b in &chosen[i + 1..] {
                    assert!(d[b].unwrap() > 2, "{a} and {b} too close");
                }
            }
        }
    }
}
