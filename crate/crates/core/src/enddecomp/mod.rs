//! Randomized tree-like decomposition of graphs with infinitely many ends:
//! graph oracles, minimal end-cuts, the independent sets `I_R` and the staged
//! removal schedule.

mod decomposing;
mod endcuts;
mod oracle;
mod stage;

pub use decomposing::{factor_graph, is_decomposing, sample_i_r, FactorGraph};
pub use endcuts::{enumerate_min_endcuts, escape_radius, CutSet, EndCutFinder};
pub use oracle::{
    ball_sizes, FreeProductTrianglesOracle, GraphOracle, GridOracle, LadderOracle, PathOracle,
    Tree3Oracle, TreeTimesEdgeOracle, TriangleTimesPathOracle, TriangularHalfPlaneOracle, View,
    MAX_VIEW_VERTICES, ORACLE_NAMES,
};
pub use stage::{
    decompose, ComponentClass, ComponentReport, DecomposeConfig, Decomposer, DecompositionReport,
    DecompositionState, StageReport, StageSchedule,
};
