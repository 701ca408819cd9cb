//! Randomised planar embeddings assembled from 3-block trees.
//!
//! Each 3-block gets its own embedding (a uniform cyclic order for
//! multilinks, a uniform mirror image for 3-connected blocks, the unique one
//! for cycles). Embeddings are merged along the tree links, and blocks that
//! meet at a cutvertex are interleaved by a random cyclic order of blocks.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::blocktree::{
    canonicalize, decompose_3blocks, edge_amalgam, fold_links, Amalgam, AmalgamSpec, BlockKind,
    ThreeBlockTree,
};
use crate::error::{Error, Result};
use crate::multigraph::{ball, blocks_and_cutvertices, DartId, MultiGraph, VertexId};
use crate::planar::{planar_embed, Chirality};
use crate::rotation::RotationSystem;
use crate::seed::{derive_seed, rng_for};

/// Rotation on `amalgam.graph` obtained from `ra` and `rb`: at each glued
/// vertex the darts following `fa` in `ra` are followed by the darts
/// following `fb` in `rb`.
pub(crate) fn merged_rotation(
    a: &MultiGraph,
    ra: &RotationSystem,
    b: &MultiGraph,
    rb: &RotationSystem,
    spec: &AmalgamSpec,
    amalgam: &Amalgam,
) -> Result<RotationSystem> {
    let map_a = |d: DartId| 2 * amalgam.a_edge[d / 2].unwrap() + (d & 1);
    let map_b = |d: DartId| 2 * amalgam.b_edge[d / 2].unwrap() + (d & 1);
    // darts after `start` in the rotation at its vertex
    let after = |rs: &RotationSystem, start: DartId| {
        let mut out = Vec::new();
        let mut d = rs.succ(start);
        while d != start {
            out.push(d);
            d = rs.succ(d);
        }
        out
    };
    let mut orders: Vec<Vec<DartId>> = vec![Vec::new(); amalgam.graph.num_vertices()];
    for v in 0..a.num_vertices() {
        let target = amalgam.a_vertex[v];
        if v == spec.fa_tail || v == spec.fa_head {
            let fa_dart = a.dart_at(spec.fa, v).unwrap();
            let vb = if v == spec.fa_tail { spec.fb_tail } else { spec.fb_head };
            let fb_dart = b.dart_at(spec.fb, vb).unwrap();
            let mut order: Vec<DartId> = after(ra, fa_dart).into_iter().map(map_a).collect();
            order.extend(after(rb, fb_dart).into_iter().map(map_b));
            orders[target] = order;
        } else {
            orders[target] = ra.rotation_at(v).into_iter().map(map_a).collect();
        }
    }
    for v in 0..b.num_vertices() {
        if v != spec.fb_tail && v != spec.fb_head {
            orders[amalgam.b_vertex[v]] = rb.rotation_at(v).into_iter().map(map_b).collect();
        }
    }
    RotationSystem::from_cyclic_orders(&amalgam.graph, &orders)
}

/// Edge amalgam of two planar embedded graphs with the merged rotation.
pub fn merge_embeddings(
    a: &MultiGraph,
    ra: &RotationSystem,
    b: &MultiGraph,
    rb: &RotationSystem,
    spec: &AmalgamSpec,
) -> Result<(Amalgam, RotationSystem)> {
    for (name, rs) in [("A", ra), ("B", rb)] {
        if rs.genus()? != 0 {
            return Err(Error::InvalidAmalgam(format!("embedding of {name} is not planar")));
        }
    }
    let amalgam = edge_amalgam(a, b, spec)?;
    let rs = merged_rotation(a, ra, b, rb, spec, &amalgam)?;
    Ok((amalgam, rs))
}

/// A 3-block tree with a chosen planar rotation for every block.
#[derive(Clone, Debug)]
pub struct EmbeddedBlockTree {
    pub tree: ThreeBlockTree,
    pub rotations: Vec<RotationSystem>,
}

/// Uniform cyclic order of a multilink: a random order at vertex 0 and the
/// reversed order at vertex 1.
fn multilink_rotation(g: &MultiGraph, rng: &mut impl Rng) -> RotationSystem {
    let mut edges: Vec<usize> = (0..g.num_edges()).collect();
    edges.shuffle(rng);
    let at0: Vec<DartId> = edges.iter().map(|&e| g.dart_at(e, 0).unwrap()).collect();
    let at1: Vec<DartId> = edges.iter().rev().map(|&e| g.dart_at(e, 1).unwrap()).collect();
    RotationSystem::from_cyclic_orders(g, &[at0, at1]).expect("multilink rotation")
}

impl EmbeddedBlockTree {
    /// Embeds every block of `tree` with randomness derived from `seed`.
    pub fn choose(tree: ThreeBlockTree, seed: u64, chirality: Chirality) -> Result<Self> {
        let mut rotations = Vec::with_capacity(tree.blocks.len());
        for (i, block) in tree.blocks.iter().enumerate() {
            let mut rng = rng_for(seed, "block", i as u64);
            let rs = match block.kind {
                BlockKind::Cycle => RotationSystem::incidence_order(&block.graph),
                BlockKind::Multilink => multilink_rotation(&block.graph, &mut rng),
                BlockKind::ThreeConnected => {
                    let res = planar_embed(&block.graph)?;
                    if !res.planar {
                        return Err(Error::NonPlanar(block.real_edges()));
                    }
                    match chirality {
                        Chirality::Coin if rng.gen_bool(0.5) => res.rs.invert(),
                        _ => res.rs,
                    }
                }
            };
            rotations.push(rs);
        }
        Ok(EmbeddedBlockTree { tree, rotations })
    }

    /// Breadth-first link order from block 0.
    pub fn bfs_order(&self) -> Vec<usize> {
        let t = &self.tree;
        let mut seen = vec![false; t.blocks.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for (l, link) in t.links.iter().enumerate() {
                let other = if link.a == x {
                    link.b
                } else if link.b == x {
                    link.a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    order.push(l);
                    queue.push_back(other);
                }
            }
        }
        order
    }

    /// Folds the block rotations along the links in `order`, returning the
    /// rotation on `reconstruct(tree)` and each vertex's (block, local) key.
    pub fn fold(&self, order: &[usize]) -> Result<(MultiGraph, RotationSystem, Vec<(usize, VertexId)>)> {
        let piece = fold_links(&self.tree, Some(&self.rotations), order)?;
        let (graph, rs, keys) = canonicalize(&piece)?;
        Ok((graph, rs.expect("rotations were supplied"), keys))
    }
}

/// Planar rotation of `reconstruct(tree)` assembled from random block
/// embeddings.
pub fn embed_block_tree(tree: &ThreeBlockTree, seed: u64) -> Result<RotationSystem> {
    embed_block_tree_with(tree, seed, Chirality::Coin)
}

pub fn embed_block_tree_with(tree: &ThreeBlockTree, seed: u64, chirality: Chirality) -> Result<RotationSystem> {
    let embedded = EmbeddedBlockTree::choose(tree.clone(), seed, chirality)?;
    let order = embedded.bfs_order();
    Ok(embedded.fold(&order)?.1)
}

/// Cyclic order at a cutvertex: a uniformly rotated copy of each block's
/// order, the blocks arranged in a uniform cyclic order.
pub fn sigma_v(blocks_at_v: &[Vec<DartId>], seed: u64) -> Result<Vec<DartId>> {
    if blocks_at_v.is_empty() {
        return Err(Error::Empty("no blocks at vertex"));
    }
    let mut rng = rng_for(seed, "sigma", 0);
    let rotated: Vec<Vec<DartId>> = blocks_at_v
        .iter()
        .map(|order| {
            let s = if order.is_empty() { 0 } else { rng.gen_range(0..order.len()) };
            order[s..].iter().chain(&order[..s]).copied().collect()
        })
        .collect();
    let mut rest: Vec<usize> = (1..rotated.len()).collect();
    rest.shuffle(&mut rng);
    let mut out = rotated[0].clone();
    for i in rest {
        out.extend_from_slice(&rotated[i]);
    }
    Ok(out)
}

/// Random planar rotation system of a connected planar multigraph.
pub fn embed_graph(g: &MultiGraph, seed: u64) -> Result<RotationSystem> {
    embed_graph_with(g, seed, Chirality::Coin)
}

pub fn embed_graph_with(g: &MultiGraph, seed: u64, chirality: Chirality) -> Result<RotationSystem> {
    let check = planar_embed(g)?;
    if !check.planar {
        return Err(Error::NonPlanar(check.witness.unwrap_or_default()));
    }
    let decomposition = blocks_and_cutvertices(g)?;
    // per vertex, the cyclic order contributed by each block
    let mut parts: Vec<Vec<Vec<DartId>>> = vec![Vec::new(); g.num_vertices()];
    for (bi, block) in decomposition.blocks.iter().enumerate() {
        if block.edges.is_empty() {
            continue;
        }
        let sub = g.edge_subgraph(&block.edges);
        let to_g = |d: DartId| 2 * sub.edge_origin[d / 2] + (d & 1);
        let (rs, origin): (RotationSystem, Vec<VertexId>) = if sub.graph.num_edges() < 3 {
            (RotationSystem::incidence_order(&sub.graph), sub.vertex_origin.clone())
        } else {
            let tree = decompose_3blocks(&sub.graph)?;
            let embedded = EmbeddedBlockTree::choose(tree, derive_seed(seed, "2-block", bi as u64), chirality)?;
            let order = embedded.bfs_order();
            let (_, rs, keys) = embedded.fold(&order)?;
            let origin = keys
                .iter()
                .map(|&k| sub.vertex_origin[embedded.tree.origin(k)])
                .collect();
            (rs, origin)
        };
        for (v, order) in rs.cyclic_orders().into_iter().enumerate() {
            parts[origin[v]].push(order.into_iter().map(to_g).collect());
        }
    }
    let mut orders = Vec::with_capacity(g.num_vertices());
    for (v, p) in parts.into_iter().enumerate() {
        orders.push(match p.len() {
            0 => Vec::new(),
            1 => p.into_iter().next().unwrap(),
            _ => sigma_v(&p, derive_seed(seed, "cutvertex", v as u64))?,
        });
    }
    let rs = RotationSystem::from_cyclic_orders(g, &orders)?;
    debug_assert_eq!(rs.genus().ok(), Some(0));
    Ok(rs)
}

/// One radius of an exhaustion of a graph by balls around a root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustionStep {
    pub radius: usize,
    pub ball_vertices: usize,
    /// Vertices of the 3-connected 3-block of the ball that contains the
    /// root and all its neighbours, if there is one.
    pub three_block: Option<Vec<VertexId>>,
    /// Neighbours of the root in the cyclic order of that 3-block's
    /// embedding.
    pub rotation_at_root: Option<Vec<VertexId>>,
    /// Whether that order matches the full graph's order up to reflection.
    pub agrees: bool,
}

fn same_cyclic_up_to_reflection(x: &[VertexId], y: &[VertexId]) -> bool {
    if x.len() != y.len() {
        return false;
    }
    if x.is_empty() {
        return true;
    }
    let matches = |seq: &[VertexId]| {
        (0..seq.len()).any(|s| (0..seq.len()).all(|i| seq[(s + i) % seq.len()] == x[i]))
    };
    let rev: Vec<VertexId> = y.iter().rev().copied().collect();
    matches(y) || matches(&rev)
}

/// Exhausts a 3-connected planar graph by balls around `root` and records,
/// per radius, the 3-block holding the root's neighbourhood and the rotation
/// it induces at the root.
pub fn exhaustion_profile(g: &MultiGraph, root: VertexId) -> Result<Vec<ExhaustionStep>> {
    let full = planar_embed(g)?;
    if !full.planar {
        return Err(Error::NonPlanar(full.witness.unwrap_or_default()));
    }
    let simple = g.simplify().graph;
    if !crate::multigraph::is_k_connected(&simple, 3) {
        return Err(Error::NotKConnected(3));
    }
    let neighbour_order = |rs: &RotationSystem, graph: &MultiGraph, v: VertexId, origin: &dyn Fn(VertexId) -> VertexId| {
        rs.rotation_at(v)
            .into_iter()
            .map(|d| origin(graph.dart_head(d)))
            .collect::<Vec<_>>()
    };
    let reference = neighbour_order(&full.rs, g, root, &|v| v);
    let mut neighbours: Vec<VertexId> = reference.clone();
    neighbours.sort_unstable();
    neighbours.dedup();
    let ecc = g.bfs_distances(root).into_iter().flatten().max().unwrap_or(0);

    let mut steps = Vec::new();
    for radius in 1..=ecc.max(1) {
        let b = ball(g, root, radius)?;
        let sub = &b.subgraph;
        let mut step = ExhaustionStep {
            radius,
            ball_vertices: sub.graph.num_vertices(),
            three_block: None,
            rotation_at_root: None,
            agrees: false,
        };
        let blocks = blocks_and_cutvertices(&sub.graph)?;
        let holder = blocks.blocks.iter().find(|bl| {
            neighbours
                .iter()
                .chain(std::iter::once(&root))
                .all(|&w| sub.local_vertex(w).is_some_and(|lw| bl.vertices.binary_search(&lw).is_ok()))
        });
        if let Some(block) = holder.filter(|bl| bl.edges.len() >= 3) {
            let bsub = sub.graph.edge_subgraph(&block.edges);
            let to_g = |v: VertexId| sub.vertex_origin[bsub.vertex_origin[v]];
            let tree = decompose_3blocks(&bsub.graph)?;
            let found = tree.blocks.iter().find(|tb| {
                tb.kind == BlockKind::ThreeConnected
                    && neighbours
                        .iter()
                        .chain(std::iter::once(&root))
                        .all(|&w| tb.vertex_origin.iter().any(|&o| to_g(o) == w))
            });
            if let Some(tb) = found {
                let verts: Vec<VertexId> = tb.vertex_origin.iter().map(|&o| to_g(o)).collect();
                let rs = planar_embed(&tb.graph)?.rs;
                let lr = tb
                    .vertex_origin
                    .iter()
                    .position(|&o| to_g(o) == root)
                    .expect("root is in the block");
                let order = neighbour_order(&rs, &tb.graph, lr, &|v| to_g(tb.vertex_origin[v]));
                step.agrees = same_cyclic_up_to_reflection(&order, &reference);
                step.rotation_at_root = Some(order);
                let mut sorted = verts;
                sorted.sort_unstable();
                step.three_block = Some(sorted);
            }
        }
        steps.push(step);
    }
    Ok(steps)
}

/// Smallest radius from which every step has the root's 3-block and an
/// agreeing rotation.
pub fn stabilization_radius(steps: &[ExhaustionStep]) -> Option<usize> {
    let mut r0 = None;
    for step in steps.iter().rev() {
        if step.agrees {
            r0 = Some(step.radius);
        } else {
            break;
        }
    }
    r0
}
