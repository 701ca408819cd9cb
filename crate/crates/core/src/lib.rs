//! Unimodular planar maps: rotation systems, planarity with Kuratowski
//! witnesses, 3-block trees, random planar embeddings, end-cut decompositions
//! of graph oracles and finite unimodularity statistics.

pub mod amalgam_embed;
pub mod blocktree;
pub mod cli;
pub mod enddecomp;
pub mod error;
pub mod generators;
pub mod multigraph;
pub mod planar;
pub mod rotation;
pub mod seed;
pub mod unimodular_stats;

pub use error::{Error, Result};
