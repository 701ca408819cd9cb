use proptest::prelude::*;

use unimap::amalgam_embed::embed_graph;
use unimap::blocktree::{decompose_3blocks, ThreeBlockTree};
use unimap::generators::{random_biconnected_planar, random_connected_planar};
use unimap::multigraph::{DartId, EdgeId, MultiGraph};
use unimap::planar::{classify_obstruction, planar_embed, ObstructionKind};
use unimap::rotation::RotationSystem;
use unimap::unimodular_stats::{mtp_check, mtp_check_exact, Transport};

fn arb_graph(max_n: usize, max_m: usize) -> impl Strategy<Value = MultiGraph> {
    (1..=max_n)
        .prop_flat_map(move |n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=max_m)))
        .prop_map(|(n, pairs)| {
            let mut g = MultiGraph::new(n);
            for (u, v) in pairs {
                if u != v {
                    g.add_edge(u, v).unwrap();
                }
            }
            g
        })
}

/// A graph together with an arbitrary rotation at every vertex.
fn arb_rotation() -> impl Strategy<Value = (MultiGraph, Vec<Vec<DartId>>)> {
    arb_graph(7, 14).prop_flat_map(|g| {
        let orders: Vec<_> = (0..g.num_vertices())
            .map(|v| Just(g.darts_at(v).to_vec()).prop_shuffle())
            .collect();
        (Just(g), orders)
    })
}

/// Faces as orbits of `d -> succ(twin(d))`, traced directly.
fn orbit_count(rs: &RotationSystem) -> usize {
    let mut seen = vec![false; rs.num_darts()];
    let mut faces = 0;
    for start in 0..rs.num_darts() {
        if seen[start] {
            continue;
        }
        faces += 1;
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            d = rs.succ(d ^ 1);
        }
    }
    faces
}

/// Walks the degree-2 chains of a subdivision and returns the branch
/// vertices with the multiset of branch pairs they connect.
fn branch_structure(g: &MultiGraph, edges: &[EdgeId]) -> Option<(Vec<usize>, Vec<(usize, usize)>)> {
    let sub = g.edge_subgraph(edges).graph;
    let branch: Vec<usize> = (0..sub.num_vertices()).filter(|&v| !matches!(sub.degree(v), 0 | 2)).collect();
    if branch.iter().any(|&v| sub.degree(v) < 3) {
        return None;
    }
    let mut used = vec![false; sub.num_edges()];
    let mut pairs = Vec::new();
    for &b in &branch {
        for &d in sub.darts_at(b) {
            let e = d / 2;
            if used[e] {
                continue;
            }
            let (mut prev_edge, mut at) = (e, sub.dart_head(d));
            used[e] = true;
            while sub.degree(at) == 2 {
                let (next_edge, next) = sub.neighbors(at).find(|&(f, _)| f != prev_edge)?;
                used[next_edge] = true;
                prev_edge = next_edge;
                at = next;
            }
            pairs.push((b.min(at), b.max(at)));
        }
    }
    Some((branch, pairs))
}

fn is_kuratowski_subdivision(g: &MultiGraph, edges: &[EdgeId]) -> Option<ObstructionKind> {
    let (branch, mut pairs) = branch_structure(g, edges)?;
    pairs.sort_unstable();
    let distinct = pairs.windows(2).all(|w| w[0] != w[1]) && pairs.iter().all(|(a, b)| a != b);
    if !distinct {
        return None;
    }
    match branch.len() {
        5 if pairs.len() == 10 => Some(ObstructionKind::K5),
        6 if pairs.len() == 9 => {
            // two-colour the branch graph
            let mut side = vec![None; g.num_vertices()];
            side[branch[0]] = Some(false);
            for _ in 0..6 {
                for &(a, b) in &pairs {
                    match (side[a], side[b]) {
                        (Some(x), None) => side[b] = Some(!x),
                        (None, Some(x)) => side[a] = Some(!x),
                        (Some(x), Some(y)) if x == y => return None,
                        _ => {}
                    }
                }
            }
            let left = branch.iter().filter(|&&v| side[v] == Some(true)).count();
            (left == 3).then_some(ObstructionKind::K33)
        }
        _ => None,
    }
}

#[test]
fn planarity_verdicts_on_all_small_graphs() {
    let mut nonplanar = [0usize; 7];
    for n in 1..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<_> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
            let g = MultiGraph::from_edges(n, &edges).unwrap();
            if !g.is_connected() {
                continue;
            }
            let res = planar_embed(&g).unwrap();
            if res.planar {
                assert_eq!(res.rs.genus().unwrap(), 0, "{edges:?}");
            } else {
                let w = res.witness.expect("witness");
                let kind = is_kuratowski_subdivision(&g, &w).unwrap_or_else(|| panic!("bad witness on {edges:?}"));
                assert_eq!(classify_obstruction(&g, &w), Some(kind));
                nonplanar[n] += 1;
            }
        }
    }
    assert_eq!(&nonplanar[..6], &[0, 0, 0, 0, 0, 1]);
    assert!(nonplanar[6] > 0);
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn faces_match_orbit_count((g, orders) in arb_rotation()) {
        let rs = RotationSystem::from_cyclic_orders(&g, &orders).unwrap();
        let faces = rs.trace_faces();
        prop_assert_eq!(faces.len(), orbit_count(&rs));
        prop_assert_eq!(faces.length_profile().iter().sum::<usize>(), 2 * g.num_edges());
        prop_assert_eq!(rs.invert().num_faces(), rs.num_faces());
    }

    #[test]
    fn genus_within_euler_bounds((g, orders) in arb_rotation()) {
        prop_assume!(g.is_connected());
        let rs = RotationSystem::from_cyclic_orders(&g, &orders).unwrap();
        let genus = rs.genus().unwrap();
        let (n, m) = (g.num_vertices(), g.num_edges());
        prop_assert_eq!(n + rs.num_faces(), m + 2 - 2 * genus);
        prop_assert!(2 * genus <= m + 1 - n);
    }

    #[test]
    fn embedding_is_planar_on_planar_inputs(pieces in 1usize..8, seed in 0u64..10_000) {
        let g = random_connected_planar(pieces, seed);
        let rs = embed_graph(&g, seed).unwrap();
        prop_assert_eq!(rs.genus().unwrap(), 0);
        prop_assert_eq!(rs.num_edges(), g.num_edges());
    }

    #[test]
    fn block_tree_text_round_trip(n in 4usize..10, del in 0usize..8, extra in 0usize..3, seed in 0u64..10_000) {
        let g = random_biconnected_planar(n, del, extra, seed);
        let tree = decompose_3blocks(&g).unwrap();
        tree.validate().unwrap();
        let back = ThreeBlockTree::parse(&tree.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), tree.to_text());
    }

    #[test]
    fn exact_and_float_transport_checks_agree(g in arb_graph(8, 16)) {
        for t in Transport::ALL {
            let exact = mtp_check_exact(&g, |g, o, x| t.eval(g, o, x)).unwrap();
            let float = mtp_check(&g, |g, o, x| t.eval(g, o, x) as f64).unwrap();
            prop_assert!(exact.equal);
            prop_assert!(float.equal);
            let lhs = *exact.lhs.numer() as f64 / *exact.lhs.denom() as f64;
            prop_assert!((lhs - float.lhs).abs() < 1e-9);
        }
    }
}
