//! Uniform spanning trees and their assembly over a tree-like partition.

use rand::seq::SliceRandom;
use rand::Rng;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::multigraph::{EdgeId, MultiGraph, VertexId};
use crate::seed::{derive_seed, rng_for};

/// Uniform spanning tree by Wilson's algorithm (loop-erased random walks
/// towards vertex 0). Returns sorted edge ids; parallel edges are distinct.
pub fn wilson_ust(g: &MultiGraph, seed: u64) -> Result<Vec<EdgeId>> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::Empty("graph"));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut rng = rng_for(seed, "wilson", 0);
    let mut in_tree = vec![false; n];
    in_tree[0] = true;
    let mut next: Vec<(EdgeId, VertexId)> = vec![(usize::MAX, usize::MAX); n];
    let mut tree = Vec::with_capacity(n - 1);
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let &d = g.darts_at(u).choose(&mut rng).expect("connected graph");
            next[u] = (d / 2, g.dart_head(d));
            u = next[u].1;
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            tree.push(next[u].0);
            u = next[u].1;
        }
    }
    tree.sort_unstable();
    Ok(tree)
}

/// Number of spanning trees (Kirchhoff), by fraction-free elimination.
pub fn spanning_tree_count(g: &MultiGraph) -> u128 {
    let n = g.num_vertices();
    if n <= 1 {
        return 1;
    }
    let k = n - 1;
    let mut a = vec![vec![0i128; k]; k];
    for (_, u, v) in g.edges() {
        for (x, y) in [(u, v), (v, u)] {
            if x > 0 {
                a[x - 1][x - 1] += 1;
                if y > 0 {
                    a[x - 1][y - 1] -= 1;
                }
            }
        }
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for i in 0..k {
        if a[i][i] == 0 {
            let Some(p) = (i + 1..k).find(|&r| a[r][i] != 0) else {
                return 0;
            };
            a.swap(i, p);
            sign = -sign;
        }
        for r in i + 1..k {
            for c in i + 1..k {
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) / prev;
            }
        }
        prev = a[i][i];
    }
    (sign * a[k - 1][k - 1]) as u128
}

/// `edges` spans `g`, has `n - 1` elements and no cycle.
pub fn is_spanning_tree(g: &MultiGraph, edges: &[EdgeId]) -> bool {
    let n = g.num_vertices();
    if edges.len() + 1 != n {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for &e in edges {
        if e >= g.num_edges() {
            return false;
        }
        let (u, v) = g.endpoints(e);
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Spanning tree of `g` built from a uniform spanning tree inside each part
/// plus one uniform connecting edge per adjacent pair of parts. `part[v]`
/// labels the part of `v`; parts must be connected and the factor graph a
/// tree.
pub fn assemble_spanning_tree(g: &MultiGraph, part: &[usize], seed: u64) -> Result<Vec<EdgeId>> {
    let n = g.num_vertices();
    if part.len() != n {
        return Err(Error::InvalidPartition(format!("{} labels for {n} vertices", part.len())));
    }
    let mut labels: Vec<usize> = part.to_vec();
    labels.sort_unstable();
    labels.dedup();
    let index = |l: usize| labels.binary_search(&l).unwrap();
    let k = labels.len();
    let mut members = vec![Vec::new(); k];
    for v in 0..n {
        members[index(part[v])].push(v);
    }

    let mut crossing: FxHashMap<(usize, usize), Vec<EdgeId>> = FxHashMap::default();
    for (e, u, v) in g.edges() {
        let (a, b) = (index(part[u]), index(part[v]));
        if a != b {
            crossing.entry((a.min(b), a.max(b))).or_default().push(e);
        }
    }
    let mut pairs: Vec<(usize, usize)> = crossing.keys().copied().collect();
    pairs.sort_unstable();
    let factor = MultiGraph::from_edges(k, &pairs)?;
    if pairs.len() + 1 != k || !factor.is_connected() {
        return Err(Error::InvalidPartition(format!(
            "factor graph on {k} parts with {} adjacent pairs is not a tree",
            pairs.len()
        )));
    }

    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for (i, vertices) in members.iter().enumerate() {
        let sub = g.induced_subgraph(vertices);
        if !sub.graph.is_connected() {
            return Err(Error::InvalidPartition(format!("part {} is disconnected", labels[i])));
        }
        if vertices.len() > 1 {
            let local = wilson_ust(&sub.graph, derive_seed(seed, "part", i as u64))?;
            tree.extend(local.into_iter().map(|e| sub.edge_origin[e]));
        }
    }
    let mut rng = rng_for(seed, "bridges", 0);
    for p in &pairs {
        let options = &crossing[p];
        tree.push(options[rng.gen_range(0..options.len())]);
    }
    tree.sort_unstable();
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, grid, path};

    #[test]
    fn triangle_frequencies() {
        let g = cycle(3);
        let mut counts: FxHashMap<Vec<EdgeId>, usize> = FxHashMap::default();
        for seed in 0..3000 {
            *counts.entry(wilson_ust(&g, seed).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        for &c in counts.values() {
            let f = c as f64 / 3000.0;
            assert!((0.30..=0.37).contains(&f), "{f}");
        }
    }

    #[test]
    fn trees_are_fixed_points() {
        let p = path(7);
        assert_eq!(wilson_ust(&p, 3).unwrap(), (0..6).collect::<Vec<_>>());
        assert!(matches!(wilson_ust(&MultiGraph::new(2), 0), Err(Error::Disconnected)));
        assert_eq!(wilson_ust(&MultiGraph::new(1), 0).unwrap(), Vec::<EdgeId>::new());
    }

    #[test]
    fn kirchhoff_counts() {
        assert_eq!(spanning_tree_count(&complete(4)), 16);
        assert_eq!(spanning_tree_count(&complete(6)), 6u128.pow(4));
        assert_eq!(spanning_tree_count(&cycle(9)), 9);
        assert_eq!(spanning_tree_count(&grid(3, 3)), 192);
        let theta = MultiGraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(spanning_tree_count(&theta), 3);
        assert_eq!(spanning_tree_count(&MultiGraph::new(3)), 0);
    }

    #[test]
    fn output_is_spanning() {
        let g = grid(6, 5);
        for seed in 0..50 {
            assert!(is_spanning_tree(&g, &wilson_ust(&g, seed).unwrap()));
        }
    }

    #[test]
    fn assembly_over_two_triangles() {
        // triangles 0-1-2 and 3-4-5 joined by 0-3 and 1-4
        let g = MultiGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4)]).unwrap();
        let part = [0, 0, 0, 1, 1, 1];
        for seed in 0..100 {
            let t = assemble_spanning_tree(&g, &part, seed).unwrap();
            assert_eq!(t.len(), 5);
            assert!(is_spanning_tree(&g, &t));
            assert_eq!(t.iter().filter(|&&e| e >= 6).count(), 1);
        }
        assert_eq!(assemble_spanning_tree(&g, &[7; 6], 1).unwrap(), wilson_ust(&g, derive_seed(1, "part", 0)).unwrap());
        // three parts in a triangle of adjacencies
        let c = cycle(6);
        assert!(matches!(assemble_spanning_tree(&c, &[0, 0, 1, 1, 2, 2], 0), Err(Error::InvalidPartition(_))));
        assert!(matches!(assemble_spanning_tree(&path(4), &[0, 1, 1, 0], 0), Err(Error::InvalidPartition(_))));
    }
}
