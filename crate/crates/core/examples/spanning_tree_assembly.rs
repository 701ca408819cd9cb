//! Uniform spanning trees glued across the parts of an end decomposition.

use unimap::enddecomp::{DecomposeConfig, Decomposer};
use unimap::unimodular_stats::{assemble_spanning_tree, is_spanning_tree, spanning_tree_count, wilson_ust};

fn main() -> unimap::Result<()> {
    let config = DecomposeConfig {
        r_max: 2,
        ..DecomposeConfig::default()
    };
    let dec = Decomposer::new("c3-x-path", config)?;
    let (state, _) = dec.run_state(4)?;
    let window = dec.view.graph.induced_subgraph(&dec.window());
    let (part, parts) = window.graph.components_filtered(|e| state.alive[window.edge_origin[e]]);
    let tree = assemble_spanning_tree(&window.graph, &part, 4)?;
    println!(
        "window: {} vertices in {} parts; assembled tree spanning = {}",
        window.graph.num_vertices(),
        parts,
        is_spanning_tree(&window.graph, &tree)
    );
    let whole = wilson_ust(&window.graph, 4)?;
    println!(
        "{} spanning trees in the window; Wilson tree has {} edges",
        spanning_tree_count(&window.graph),
        whole.len()
    );
    Ok(())
}
