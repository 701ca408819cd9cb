use thiserror::Error;

use crate::multigraph::{EdgeId, VertexId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("graph is not connected")]
    Disconnected,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed rotation system: {0}")]
    MalformedRotation(String),
    #[error("parallel bundle {0:?} is not consecutive in the rotation system")]
    BundleNotConsecutive(Vec<EdgeId>),
    #[error("graph is not planar (obstruction edges {0:?})")]
    NonPlanar(Vec<EdgeId>),
    #[error("graph is not {0}-connected")]
    NotKConnected(u8),
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("invalid edge amalgam: {0}")]
    InvalidAmalgam(String),
    #[error("invalid 3-block tree: {0}")]
    InvalidBlockTree(String),
    #[error("need at least 3 edges, got {0}")]
    TooFewEdges(usize),
    #[error("horizon exhausted: {0}")]
    HorizonExhausted(String),
    #[error("unknown oracle `{0}`")]
    UnknownOracle(String),
    #[error("transport function returned {value} for pair ({from}, {to})")]
    InvalidTransport { from: VertexId, to: VertexId, value: f64 },
    #[error("ball radius mismatch: {0} vs {1}")]
    RadiusMismatch(usize, usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
