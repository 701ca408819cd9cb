//! Local access to infinite graphs and their finite views.

use std::collections::VecDeque;
use std::fmt::Debug;
use std::hash::{Hash, Hasher};

use rustc_hash::{FxHashMap, FxHasher};

use crate::error::{Error, Result};
use crate::multigraph::{MultiGraph, VertexId};
use crate::seed::hash_label;

/// Neighbourhood queries on a locally finite, possibly infinite graph.
/// A neighbour listed `k` times is joined by `k` parallel edges.
pub trait GraphOracle {
    type Vertex: Clone + Eq + Hash + Debug;

    fn name(&self) -> &'static str;
    fn origin(&self) -> Self::Vertex;
    fn neighbors(&self, v: &Self::Vertex) -> Vec<Self::Vertex>;
}

/// Bi-infinite path `Z`.
pub struct PathOracle;

impl GraphOracle for PathOracle {
    type Vertex = i64;
    fn name(&self) -> &'static str {
        "path"
    }
    fn origin(&self) -> i64 {
        0
    }
    fn neighbors(&self, v: &i64) -> Vec<i64> {
        vec![v - 1, v + 1]
    }
}

/// Ladder `Z x K2`.
pub struct LadderOracle;

impl GraphOracle for LadderOracle {
    type Vertex = (i64, u8);
    fn name(&self) -> &'static str {
        "ladder"
    }
    fn origin(&self) -> (i64, u8) {
        (0, 0)
    }
    fn neighbors(&self, &(i, s): &(i64, u8)) -> Vec<(i64, u8)> {
        vec![(i - 1, s), (i + 1, s), (i, 1 - s)]
    }
}

/// Square lattice `Z^2` (one-ended).
pub struct GridOracle;

impl GraphOracle for GridOracle {
    type Vertex = (i64, i64);
    fn name(&self) -> &'static str {
        "grid"
    }
    fn origin(&self) -> (i64, i64) {
        (0, 0)
    }
    fn neighbors(&self, &(x, y): &(i64, i64)) -> Vec<(i64, i64)> {
        vec![(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)]
    }
}

/// Reduced words over three involutions: the 3-regular tree.
pub struct Tree3Oracle;

fn tree_step(word: &[u8], g: u8) -> Vec<u8> {
    let mut w = word.to_vec();
    if w.last() == Some(&g) {
        w.pop();
    } else {
        w.push(g);
    }
    w
}

impl GraphOracle for Tree3Oracle {
    type Vertex = Vec<u8>;
    fn name(&self) -> &'static str {
        "tree3"
    }
    fn origin(&self) -> Vec<u8> {
        Vec::new()
    }
    fn neighbors(&self, w: &Vec<u8>) -> Vec<Vec<u8>> {
        (0..3).map(|g| tree_step(w, g)).collect()
    }
}

/// The 3-regular tree times an edge.
pub struct TreeTimesEdgeOracle;

impl GraphOracle for TreeTimesEdgeOracle {
    type Vertex = (Vec<u8>, u8);
    fn name(&self) -> &'static str {
        "tree-x-edge"
    }
    fn origin(&self) -> (Vec<u8>, u8) {
        (Vec::new(), 0)
    }
    fn neighbors(&self, (w, s): &(Vec<u8>, u8)) -> Vec<(Vec<u8>, u8)> {
        let mut out: Vec<_> = (0..3).map(|g| (tree_step(w, g), *s)).collect();
        out.push((w.clone(), 1 - s));
        out
    }
}

/// Cayley graph of `Z3 * Z3` with generators `a, a^2, b, b^2`: a tree of
/// triangles, every vertex in two of them.
pub struct FreeProductTrianglesOracle;

/// Right multiplication of a reduced word of (factor, power) syllables by
/// the generator `factor^power`.
fn free_product_step(word: &[(u8, u8)], factor: u8, power: u8) -> Vec<(u8, u8)> {
    let mut w = word.to_vec();
    match w.last_mut() {
        Some(last) if last.0 == factor => {
            let p = (last.1 + power) % 3;
            if p == 0 {
                w.pop();
            } else {
                last.1 = p;
            }
        }
        _ => w.push((factor, power)),
    }
    w
}

impl GraphOracle for FreeProductTrianglesOracle {
    type Vertex = Vec<(u8, u8)>;
    fn name(&self) -> &'static str {
        "freeprod-triangle"
    }
    fn origin(&self) -> Vec<(u8, u8)> {
        Vec::new()
    }
    fn neighbors(&self, w: &Vec<(u8, u8)>) -> Vec<Vec<(u8, u8)>> {
        let mut out = Vec::with_capacity(4);
        for factor in 0..2 {
            for power in 1..3 {
                out.push(free_product_step(w, factor, power));
            }
        }
        out
    }
}

/// Triangular lattice restricted to the closed upper half-plane.
pub struct TriangularHalfPlaneOracle;

impl GraphOracle for TriangularHalfPlaneOracle {
    type Vertex = (i64, i64);
    fn name(&self) -> &'static str {
        "tri-halfplane"
    }
    fn origin(&self) -> (i64, i64) {
        (0, 0)
    }
    fn neighbors(&self, &(x, y): &(i64, i64)) -> Vec<(i64, i64)> {
        [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1), (x + 1, y - 1), (x - 1, y + 1)]
            .into_iter()
            .filter(|&(_, b)| b >= 0)
            .collect()
    }
}

/// Triangle times the bi-infinite path (two-ended).
pub struct TriangleTimesPathOracle;

impl GraphOracle for TriangleTimesPathOracle {
    type Vertex = (i64, u8);
    fn name(&self) -> &'static str {
        "c3-x-path"
    }
    fn origin(&self) -> (i64, u8) {
        (0, 0)
    }
    fn neighbors(&self, &(i, k): &(i64, u8)) -> Vec<(i64, u8)> {
        vec![(i - 1, k), (i + 1, k), (i, (k + 1) % 3), (i, (k + 2) % 3)]
    }
}

pub const ORACLE_NAMES: [&str; 8] = [
    "path",
    "ladder",
    "grid",
    "tree3",
    "tree-x-edge",
    "freeprod-triangle",
    "tri-halfplane",
    "c3-x-path",
];

/// Evaluates `$body` with `$o` bound to the oracle named `$name`.
macro_rules! with_oracle {
    ($name:expr, $o:ident => $body:expr) => {
        match $name {
            "path" => {
                let $o = PathOracle;
                $body
            }
            "ladder" => {
                let $o = LadderOracle;
                $body
            }
            "grid" => {
                let $o = GridOracle;
                $body
            }
            "tree3" => {
                let $o = Tree3Oracle;
                $body
            }
            "tree-x-edge" => {
                let $o = TreeTimesEdgeOracle;
                $body
            }
            "freeprod-triangle" => {
                let $o = FreeProductTrianglesOracle;
                $body
            }
            "tri-halfplane" => {
                let $o = TriangularHalfPlaneOracle;
                $body
            }
            "c3-x-path" => {
                let $o = TriangleTimesPathOracle;
                $body
            }
            other => Err(Error::UnknownOracle(other.to_string())),
        }
    };
}

/// Largest view materialised before giving up.
pub const MAX_VIEW_VERTICES: usize = 1 << 20;

/// The ball of radius `radius` around an oracle's origin as a finite
/// multigraph. Vertex 0 is the origin; ids follow breadth-first order.
#[derive(Clone, Debug)]
pub struct View {
    pub name: String,
    pub graph: MultiGraph,
    pub radius: usize,
    /// Distance from the origin.
    pub depth: Vec<usize>,
    /// Stable hash of each oracle vertex, used for labels.
    pub keys: Vec<u64>,
}

fn stable_key<T: Hash>(v: &T) -> u64 {
    let mut h = FxHasher::default();
    v.hash(&mut h);
    h.finish()
}

impl View {
    pub fn materialize<O: GraphOracle>(oracle: &O, radius: usize) -> Result<View> {
        let mut index: FxHashMap<O::Vertex, VertexId> = FxHashMap::default();
        let mut vertices = vec![oracle.origin()];
        let mut depth = vec![0usize];
        index.insert(oracle.origin(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            if depth[u] == radius {
                continue;
            }
            for w in oracle.neighbors(&vertices[u]) {
                if !index.contains_key(&w) {
                    let id = vertices.len();
                    if id >= MAX_VIEW_VERTICES {
                        return Err(Error::HorizonExhausted(format!(
                            "{} ball of radius {radius} exceeds {MAX_VIEW_VERTICES} vertices",
                            oracle.name()
                        )));
                    }
                    index.insert(w.clone(), id);
                    vertices.push(w);
                    depth.push(depth[u] + 1);
                    queue.push_back(id);
                }
            }
        }
        let mut graph = MultiGraph::new(vertices.len());
        for (u, vertex) in vertices.iter().enumerate() {
            for w in oracle.neighbors(vertex) {
                if let Some(&x) = index.get(&w) {
                    if u < x {
                        graph.add_edge(u, x)?;
                    }
                }
            }
        }
        let keys = vertices.iter().map(stable_key).collect();
        Ok(View {
            name: oracle.name().to_string(),
            graph,
            radius,
            depth,
            keys,
        })
    }

    pub fn named(name: &str, radius: usize) -> Result<View> {
        with_oracle!(name, o => View::materialize(&o, radius))
    }

    pub fn origin(&self) -> VertexId {
        0
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    /// Uniform `[0, 1)` label of `v` under `seed`; iid across vertices.
    pub fn label(&self, seed: u64, v: VertexId) -> f64 {
        hash_label(seed, &self.keys[v])
    }

    /// Fails unless the ball of radius `r` around `v` lies inside the view.
    pub fn require(&self, v: VertexId, r: usize) -> Result<()> {
        if self.depth[v] + r > self.radius {
            return Err(Error::HorizonExhausted(format!(
                "need radius {r} around a vertex at depth {} but the view has radius {}",
                self.depth[v], self.radius
            )));
        }
        Ok(())
    }

    /// Vertices within distance `r` of the origin.
    pub fn ball_vertices(&self, r: usize) -> Vec<VertexId> {
        (0..self.num_vertices()).filter(|&v| self.depth[v] <= r).collect()
    }
}

/// Sizes `|B(o, r)|` for `r = 0..=max_radius`, stopping early once a ball
/// exceeds `cap` vertices.
pub fn ball_sizes(name: &str, max_radius: usize, cap: usize) -> Result<Vec<usize>> {
    fn run<O: GraphOracle>(o: &O, max_radius: usize, cap: usize) -> Result<Vec<usize>> {
        let mut seen: FxHashMap<O::Vertex, usize> = FxHashMap::default();
        seen.insert(o.origin(), 0);
        let mut layer = vec![o.origin()];
        let mut sizes = vec![1];
        for r in 1..=max_radius {
            let mut next = Vec::new();
            for v in &layer {
                for w in o.neighbors(v) {
                    if !seen.contains_key(&w) {
                        seen.insert(w.clone(), r);
                        next.push(w);
                    }
                }
            }
            sizes.push(seen.len());
            if seen.len() > cap {
                break;
            }
            layer = next;
        }
        Ok(sizes)
    }
    with_oracle!(name, o => run(&o, max_radius, cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric<O: GraphOracle>(o: &O, radius: usize) {
        let view = View::materialize(o, radius).unwrap();
        for (e, u, v) in view.graph.edges() {
            assert!(u != v, "edge {e}");
        }
        // inner vertices have their full degree
        let deg = o.neighbors(&o.origin()).len();
        for v in 0..view.num_vertices() {
            if view.depth[v] < radius && o.name() != "tri-halfplane" {
                assert_eq!(view.graph.degree(v), deg, "{} vertex {v}", o.name());
            }
        }
    }

    #[test]
    fn oracles_are_regular_and_symmetric() {
        symmetric(&PathOracle, 5);
        symmetric(&LadderOracle, 5);
        symmetric(&GridOracle, 5);
        symmetric(&Tree3Oracle, 5);
        symmetric(&TreeTimesEdgeOracle, 5);
        symmetric(&FreeProductTrianglesOracle, 5);
        symmetric(&TriangularHalfPlaneOracle, 5);
        symmetric(&TriangleTimesPathOracle, 5);
    }

    #[test]
    fn ball_growth() {
        assert_eq!(ball_sizes("path", 4, 1000).unwrap(), vec![1, 3, 5, 7, 9]);
        assert_eq!(ball_sizes("grid", 2, 1000).unwrap(), vec![1, 5, 13]);
        assert_eq!(ball_sizes("tree3", 3, 1000).unwrap(), vec![1, 4, 10, 22]);
        assert_eq!(ball_sizes("freeprod-triangle", 3, 1000).unwrap(), vec![1, 5, 13, 29]);
        assert_eq!(ball_sizes("ladder", 2, 1000).unwrap(), vec![1, 4, 8]);
        let capped = ball_sizes("tree3", 30, 100).unwrap();
        assert!(*capped.last().unwrap() > 100 && capped.len() < 31);
        assert!(matches!(ball_sizes("moon", 1, 1), Err(Error::UnknownOracle(_))));
    }

    #[test]
    fn view_matches_growth() {
        let view = View::named("freeprod-triangle", 4).unwrap();
        assert_eq!(view.num_vertices(), 61);
        // each vertex lies in two triangles
        assert_eq!(view.graph.degree(0), 4);
        assert!(view.graph.is_simple());
        assert!(view.require(0, 4).is_ok());
        assert!(view.require(1, 4).is_err());
        let a = view.label(3, 5);
        assert_eq!(a, View::named("freeprod-triangle", 5).unwrap().label(3, 5));
    }
}
