//! Random planar rotation system of a random connected planar multigraph.

use unimap::amalgam_embed::embed_graph;
use unimap::generators::random_connected_planar;

fn main() -> unimap::Result<()> {
    let g = random_connected_planar(6, 42);
    let rs = embed_graph(&g, 7)?;
    println!(
        "{} vertices, {} edges, {} faces, genus {}",
        g.num_vertices(),
        g.num_edges(),
        rs.num_faces(),
        rs.genus()?
    );
    print!("{}", rs.to_text());
    Ok(())
}
