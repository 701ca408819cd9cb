//! Named graphs and seeded random planar families.

use rand::seq::SliceRandom;
use rand::Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::multigraph::{lowpoint, MultiGraph, VertexId};
use crate::seed::rng_for;

fn build(n: usize, edges: &[(VertexId, VertexId)]) -> MultiGraph {
    MultiGraph::from_edges(n, edges).expect("generator edges are valid")
}

pub fn path(n: usize) -> MultiGraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    build(n, &edges)
}

pub fn cycle(n: usize) -> MultiGraph {
    assert!(n >= 3);
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    build(n, &edges)
}

pub fn complete(n: usize) -> MultiGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    build(n, &edges)
}

pub fn complete_bipartite(a: usize, b: usize) -> MultiGraph {
    let mut edges = Vec::new();
    for u in 0..a {
        for v in 0..b {
            edges.push((u, a + v));
        }
    }
    build(a + b, &edges)
}

/// Hub 0 joined to a rim cycle `1..=n`.
pub fn wheel(n: usize) -> MultiGraph {
    let mut edges: Vec<_> = (1..=n).map(|i| (0, i)).collect();
    edges.extend((1..=n).map(|i| (i, i % n + 1)));
    build(n + 1, &edges)
}

/// Triangular prism: triangles 0-1-2 and 3-4-5 joined by 0-3, 1-4, 2-5.
pub fn prism() -> MultiGraph {
    build(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])
}

pub fn cube() -> MultiGraph {
    let mut edges = Vec::new();
    for u in 0..8usize {
        for bit in [1, 2, 4] {
            if u & bit == 0 {
                edges.push((u, u | bit));
            }
        }
    }
    build(8, &edges)
}

pub fn octahedron() -> MultiGraph {
    let mut edges = Vec::new();
    // antipodal pairs are (i, i + 3)
    for u in 0..6usize {
        for v in u + 1..6 {
            if v != u + 3 {
                edges.push((u, v));
            }
        }
    }
    build(6, &edges)
}

pub fn icosahedron() -> MultiGraph {
    // two poles 0 and 11, upper ring 1..=5, lower ring 6..=10
    let mut edges = Vec::new();
    for i in 0..5 {
        let up = 1 + i;
        let up_next = 1 + (i + 1) % 5;
        let lo = 6 + i;
        let lo_next = 6 + (i + 1) % 5;
        edges.push((0, up));
        edges.push((up, up_next));
        edges.push((up, lo));
        edges.push((up_next, lo));
        edges.push((lo, lo_next));
        edges.push((lo, 11));
    }
    build(12, &edges)
}

pub fn petersen() -> MultiGraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    build(10, &edges)
}

/// `w` by `h` grid; vertex `(x, y)` has id `y * w + x`.
pub fn grid(w: usize, h: usize) -> MultiGraph {
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = y * w + x;
            if x + 1 < w {
                edges.push((v, v + 1));
            }
            if y + 1 < h {
                edges.push((v, v + w));
            }
        }
    }
    build(w * h, &edges)
}

pub fn ladder(n: usize) -> MultiGraph {
    grid(n, 2)
}

/// Triangulated `w` by `h` torus grid (genus 1 for `w, h >= 3`).
pub fn torus_triangulation(w: usize, h: usize) -> MultiGraph {
    assert!(w >= 3 && h >= 3);
    let id = |x: usize, y: usize| (y % h) * w + (x % w);
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            edges.push((id(x, y), id(x + 1, y)));
            edges.push((id(x, y), id(x, y + 1)));
            edges.push((id(x, y), id(x + 1, y + 1)));
        }
    }
    build(w * h, &edges)
}

/// Random simple triangulation of the sphere on `n >= 4` vertices: stacked
/// insertions followed by random edge flips.
pub fn random_triangulation(n: usize, seed: u64) -> MultiGraph {
    assert!(n >= 4);
    let mut rng = rng_for(seed, "triangulation", n as u64);
    // oriented faces; each directed edge belongs to exactly one face
    let mut faces: Vec<[VertexId; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    let mut owner: FxHashMap<(VertexId, VertexId), usize> = FxHashMap::default();
    let set = |owner: &mut FxHashMap<(VertexId, VertexId), usize>, f: [VertexId; 3], i: usize| {
        for k in 0..3 {
            owner.insert((f[k], f[(k + 1) % 3]), i);
        }
    };
    set(&mut owner, faces[0], 0);
    set(&mut owner, faces[1], 1);
    let mut degree = vec![2usize; 3];
    for v in 3..n {
        let i = rng.gen_range(0..faces.len());
        let [a, b, c] = faces[i];
        let new = [[a, b, v], [b, c, v], [c, a, v]];
        faces[i] = new[0];
        faces.push(new[1]);
        faces.push(new[2]);
        set(&mut owner, new[0], i);
        set(&mut owner, new[1], faces.len() - 2);
        set(&mut owner, new[2], faces.len() - 1);
        degree.push(3);
        degree[a] += 1;
        degree[b] += 1;
        degree[c] += 1;
    }
    let flips = 3 * n;
    for _ in 0..flips {
        let i = rng.gen_range(0..faces.len());
        let k = rng.gen_range(0..3);
        let f = faces[i];
        let (u, v, x) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
        let j = owner[&(v, u)];
        let g = faces[j];
        let y = *g.iter().find(|&&t| t != u && t != v).unwrap();
        if x == y || owner.contains_key(&(x, y)) || degree[u] <= 3 || degree[v] <= 3 {
            continue;
        }
        owner.remove(&(u, v));
        owner.remove(&(v, u));
        // faces (u, v, x) and (v, u, y) become (x, y, v) and (y, x, u)
        faces[i] = [x, y, v];
        faces[j] = [y, x, u];
        set(&mut owner, faces[i], i);
        set(&mut owner, faces[j], j);
        degree[u] -= 1;
        degree[v] -= 1;
        degree[x] += 1;
        degree[y] += 1;
    }
    let mut edges: Vec<(VertexId, VertexId)> = owner
        .keys()
        .filter(|&&(a, b)| a < b)
        .copied()
        .collect();
    edges.sort_unstable();
    build(n, &edges)
}

/// Random 2-connected planar multigraph: a triangulation thinned by edge
/// deletions that keep it 2-connected, then given `extra` parallel copies.
pub fn random_biconnected_planar(n: usize, deletions: usize, extra: usize, seed: u64) -> MultiGraph {
    let base = random_triangulation(n.max(4), seed);
    let mut rng = rng_for(seed, "thin", n as u64);
    let mut edges: Vec<(VertexId, VertexId)> = base.edges().map(|(_, u, v)| (u, v)).collect();
    edges.shuffle(&mut rng);
    let mut removed = 0;
    let mut i = 0;
    while removed < deletions && i < edges.len() {
        let mut trial = edges.clone();
        trial.remove(i);
        let g = build(base.num_vertices(), &trial);
        let low = lowpoint(&g, None);
        if low.components == 1 && !low.is_cut.iter().any(|&c| c) {
            edges = trial;
            removed += 1;
        } else {
            i += 1;
        }
    }
    for _ in 0..extra {
        let e = edges[rng.gen_range(0..edges.len())];
        edges.push(e);
    }
    build(base.num_vertices(), &edges)
}

/// Random connected planar multigraph built from 2-connected pieces glued
/// at cutvertices and joined by bridges.
pub fn random_connected_planar(pieces: usize, seed: u64) -> MultiGraph {
    let mut rng = rng_for(seed, "connected", pieces as u64);
    let mut g = MultiGraph::new(1);
    for p in 0..pieces {
        let anchor = rng.gen_range(0..g.num_vertices());
        match rng.gen_range(0..3) {
            0 => {
                let w = g.add_vertex();
                g.add_edge(anchor, w).unwrap();
            }
            _ => {
                let size = rng.gen_range(3..8);
                let piece = random_biconnected_planar(size.max(4), rng.gen_range(0..4), rng.gen_range(0..3), seed ^ p as u64);
                let offset = g.num_vertices();
                for _ in 1..piece.num_vertices() {
                    g.add_vertex();
                }
                let map = |v: VertexId| if v == 0 { anchor } else { offset + v - 1 };
                for (_, u, v) in piece.edges() {
                    g.add_edge(map(u), map(v)).unwrap();
                }
            }
        }
    }
    g
}

/// Distinct unordered vertex pairs present in `g`.
pub fn adjacency_set(g: &MultiGraph) -> FxHashSet<(VertexId, VertexId)> {
    g.edges().map(|(_, u, v)| (u.min(v), u.max(v))).collect()
}
