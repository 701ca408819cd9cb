//! Exhausts a triangulation by balls and reports when the rotation at the
//! root stops changing.

use unimap::amalgam_embed::{exhaustion_profile, stabilization_radius};
use unimap::generators::random_triangulation;

fn main() -> unimap::Result<()> {
    let g = random_triangulation(40, 3);
    let steps = exhaustion_profile(&g, 0)?;
    for s in &steps {
        println!(
            "r={} ball={} block={} agrees={}",
            s.radius,
            s.ball_vertices,
            s.three_block.as_ref().map_or(0, |b| b.len()),
            s.agrees
        );
    }
    println!("stable from r0 = {:?}", stabilization_radius(&steps));
    Ok(())
}
