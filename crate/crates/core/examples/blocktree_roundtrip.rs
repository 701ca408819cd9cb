//! Splits a 2-connected multigraph into its 3-block tree and glues it back.

use unimap::blocktree::{decompose_3blocks, isomorphic_with_edge_ids, reconstruct, BlockKind};
use unimap::generators::random_biconnected_planar;

fn main() -> unimap::Result<()> {
    let g = random_biconnected_planar(12, 10, 3, 5);
    let tree = decompose_3blocks(&g)?;
    println!(
        "{} blocks: {} cycles, {} multilinks, {} 3-connected",
        tree.num_blocks(),
        tree.count_kind(BlockKind::Cycle),
        tree.count_kind(BlockKind::Multilink),
        tree.count_kind(BlockKind::ThreeConnected)
    );
    let back = reconstruct(&tree)?;
    println!("round trip preserves edge ids: {}", isomorphic_with_edge_ids(&g, &back));
    Ok(())
}
