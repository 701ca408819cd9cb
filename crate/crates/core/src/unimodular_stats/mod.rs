//! Mass transport checks, rooted ball statistics and uniform spanning trees
//! on finite graphs.

mod balls;
mod mtp;
mod ust;

pub use balls::{
    ball_code, canonical_code, exact_ball_distribution, local_distance, oracle_ball_distribution,
    sample_balls, to_hex, tv_distance, tv_distance_exact, BallDistribution,
};
pub use mtp::{mtp_check, mtp_check_exact, MtpResult, RandomTransport, Transport, MTP_TOLERANCE};
pub use ust::{assemble_spanning_tree, is_spanning_tree, spanning_tree_count, wilson_ust};
