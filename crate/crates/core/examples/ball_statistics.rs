//! Ball statistics of finite paths converging to the bi-infinite line.

use unimap::generators::path;
use unimap::unimodular_stats::{exact_ball_distribution, oracle_ball_distribution, tv_distance_exact};

fn main() -> unimap::Result<()> {
    let line = oracle_ball_distribution("path", 3, 1)?;
    for n in [10, 50, 100, 200, 1000] {
        let p = exact_ball_distribution(&path(n), 3)?;
        println!("P{n}: tv = {}", tv_distance_exact(&p, &line)?);
    }
    Ok(())
}
