//! Mass transport on finite graphs with a uniform root.

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::multigraph::{MultiGraph, VertexId};
use crate::seed::rng_for;

#[derive(Clone, Debug, PartialEq)]
pub struct MtpResult<T> {
    /// Expected mass sent out of the root.
    pub lhs: T,
    /// Expected mass received by the root.
    pub rhs: T,
    pub equal: bool,
}

pub const MTP_TOLERANCE: f64 = 1e-12;

/// Floating-point check; `f(g, o, x)` is the mass sent from `o` to `x`.
pub fn mtp_check(
    g: &MultiGraph,
    f: impl Fn(&MultiGraph, VertexId, VertexId) -> f64,
) -> Result<MtpResult<f64>> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::Empty("graph"));
    }
    let mut table = vec![0.0; n * n];
    for o in 0..n {
        for x in 0..n {
            let value = f(g, o, x);
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidTransport { from: o, to: x, value });
            }
            table[o * n + x] = value;
        }
    }
    let lhs: f64 = (0..n).map(|o| (0..n).map(|x| table[o * n + x]).sum::<f64>()).sum::<f64>() / n as f64;
    let rhs: f64 = (0..n).map(|o| (0..n).map(|x| table[x * n + o]).sum::<f64>()).sum::<f64>() / n as f64;
    Ok(MtpResult {
        lhs,
        rhs,
        equal: (lhs - rhs).abs() <= MTP_TOLERANCE,
    })
}

/// Exact check for integer-valued transports.
pub fn mtp_check_exact(
    g: &MultiGraph,
    f: impl Fn(&MultiGraph, VertexId, VertexId) -> u64,
) -> Result<MtpResult<Ratio<u128>>> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::Empty("graph"));
    }
    let table: Vec<u64> = (0..n * n).map(|i| f(g, i / n, i % n)).collect();
    let out: u128 = (0..n).flat_map(|o| (0..n).map(move |x| (o, x))).map(|(o, x)| table[o * n + x] as u128).sum();
    let into: u128 = (0..n).flat_map(|o| (0..n).map(move |x| (o, x))).map(|(o, x)| table[x * n + o] as u128).sum();
    let lhs = Ratio::new(out, n as u128);
    let rhs = Ratio::new(into, n as u128);
    Ok(MtpResult {
        equal: lhs == rhs,
        lhs,
        rhs,
    })
}

/// Built-in transports, each a function of the doubly rooted graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transport {
    /// Number of edges from `o` to `x`.
    Adjacency,
    /// `deg(o)` per edge from `o` to `x`.
    DegreeWeighted,
    /// `|B(o, d(o, x))|` when `d(o, x) <= 2`, else 0.
    BallSize,
}

impl Transport {
    pub const ALL: [Transport; 3] = [Transport::Adjacency, Transport::DegreeWeighted, Transport::BallSize];

    pub fn name(self) -> &'static str {
        match self {
            Transport::Adjacency => "adjacency",
            Transport::DegreeWeighted => "degree-weighted",
            Transport::BallSize => "ball-size",
        }
    }

    pub fn from_name(name: &str) -> Option<Transport> {
        Transport::ALL.into_iter().find(|t| t.name() == name)
    }

    pub fn eval(self, g: &MultiGraph, o: VertexId, x: VertexId) -> u64 {
        match self {
            Transport::Adjacency => g.edges_between(o, x).len() as u64,
            Transport::DegreeWeighted => (g.degree(o) * g.edges_between(o, x).len()) as u64,
            Transport::BallSize => {
                let dist = g.bfs_limited(o, 2, |_| true);
                match dist[x] {
                    Some(d) => dist.iter().filter(|e| matches!(e, Some(k) if *k <= d)).count() as u64,
                    None => 0,
                }
            }
        }
    }
}

/// Integer transport `T[min(deg o, D)][min(deg x, D)][min(d(o, x), K)]`
/// with random entries; it depends only on the doubly rooted graph.
#[derive(Clone, Debug)]
pub struct RandomTransport {
    table: Vec<u64>,
}

const DEGREE_CAP: usize = 6;
const DISTANCE_CAP: usize = 4;

impl RandomTransport {
    pub fn new(seed: u64, max_value: u64) -> Self {
        let mut rng = rng_for(seed, "transport", 0);
        let size = (DEGREE_CAP + 1) * (DEGREE_CAP + 1) * (DISTANCE_CAP + 2);
        RandomTransport {
            table: (0..size).map(|_| rng.gen_range(0..=max_value)).collect(),
        }
    }

    /// `distances[o][x]` must hold hop distances, `None` if unreachable.
    pub fn eval(&self, g: &MultiGraph, distances: &[Vec<Option<usize>>], o: VertexId, x: VertexId) -> u64 {
        let a = g.degree(o).min(DEGREE_CAP);
        let b = g.degree(x).min(DEGREE_CAP);
        let d = distances[o][x].map_or(DISTANCE_CAP + 1, |d| d.min(DISTANCE_CAP));
        self.table[(a * (DEGREE_CAP + 1) + b) * (DISTANCE_CAP + 2) + d]
    }
}
