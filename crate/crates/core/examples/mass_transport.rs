//! Exact mass transport balance on a finite graph with a uniform root.

use unimap::generators;
use unimap::unimodular_stats::{mtp_check_exact, RandomTransport, Transport};

fn main() -> unimap::Result<()> {
    let g = generators::random_connected_planar(5, 8);
    for t in Transport::ALL {
        let r = mtp_check_exact(&g, |g, o, x| t.eval(g, o, x))?;
        println!("{}: out {} in {} equal {}", t.name(), r.lhs, r.rhs, r.equal);
    }
    let distances: Vec<_> = (0..g.num_vertices()).map(|v| g.bfs_distances(v)).collect();
    let f = RandomTransport::new(99, 10);
    let r = mtp_check_exact(&g, |g, o, x| f.eval(g, &distances, o, x))?;
    println!("random: out {} in {} equal {}", r.lhs, r.rhs, r.equal);
    Ok(())
}
