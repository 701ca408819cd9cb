use unimap::enddecomp::{ComponentClass, DecomposeConfig, Decomposer};

fn decomposer(name: &str, r_max: usize) -> Decomposer {
    Decomposer::new(
        name,
        DecomposeConfig {
            r_max,
            ..DecomposeConfig::default()
        },
    )
    .unwrap()
}

#[test]
fn tree_and_ladder_factor_graphs_are_forests() {
    for (name, r_max) in [("tree3", 2), ("ladder", 3), ("c3-x-path", 2)] {
        let dec = decomposer(name, r_max);
        for seed in 0..5 {
            assert!(dec.run(seed).unwrap().forest, "{name} seed {seed}");
        }
    }
    for seed in 0..5 {
        let report = decomposer("ladder", 2).run(seed).unwrap();
        assert_eq!(report.count(ComponentClass::MultiEscape), 0);
    }
}

#[test]
fn no_end_cut_is_left_at_the_tree_root() {
    let dec = decomposer("tree3", 2);
    for seed in 0..5 {
        let (state, _) = dec.run_state(seed).unwrap();
        assert!(dec.origin_cuts(&state.alive, 2).is_empty());
        assert!(!state.removed.is_empty());
    }
}

/// Square rungs of tree x edge split into three pieces, so the window
/// factor graph picks up cycles.
#[test]
fn tree_times_edge_factor_graph_has_cycles() {
    let dec = decomposer("tree-x-edge", 2);
    let nonforest = (0..4).filter(|&seed| !dec.run(seed).unwrap().forest).count();
    assert_eq!(nonforest, 4);
}

#[test]
fn runs_are_reproducible() {
    let dec = decomposer("freeprod-triangle", 1);
    let a = dec.run(12).unwrap().to_text();
    assert_eq!(a, dec.run(12).unwrap().to_text());
    assert_ne!(a, dec.run(13).unwrap().to_text());
}
