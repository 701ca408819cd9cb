//! Finite undirected multigraphs stored as dart pairs.
//!
//! Edge `e` owns darts `2e` (at its first endpoint) and `2e + 1` (at its
//! second endpoint), so `twin(d) = d ^ 1`. Parallel edges are allowed,
//! self-loops are rejected at construction.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type DartId = usize;

#[inline]
pub fn twin(d: DartId) -> DartId {
    d ^ 1
}

#[inline]
pub fn dart_edge(d: DartId) -> EdgeId {
    d >> 1
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiGraph {
    edges: Vec<[VertexId; 2]>,
    incidence: Vec<Vec<DartId>>,
}

impl MultiGraph {
    pub fn new(num_vertices: usize) -> Self {
        MultiGraph {
            edges: Vec::new(),
            incidence: vec![Vec::new(); num_vertices],
        }
    }

    pub fn from_edges(num_vertices: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut g = MultiGraph::new(num_vertices);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.incidence.push(Vec::new());
        self.incidence.len() - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        let n = self.num_vertices();
        if u >= n {
            return Err(Error::UnknownVertex(u));
        }
        if v >= n {
            return Err(Error::UnknownVertex(v));
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let e = self.edges.len();
        self.edges.push([u, v]);
        self.incidence[u].push(2 * e);
        self.incidence[v].push(2 * e + 1);
        Ok(e)
    }

    pub fn num_vertices(&self) -> usize {
        self.incidence.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_darts(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let [u, v] = self.edges[e];
        (u, v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.edges.iter().enumerate().map(|(e, &[u, v])| (e, u, v))
    }

    /// Vertex the dart leaves from.
    pub fn dart_tail(&self, d: DartId) -> VertexId {
        self.edges[d >> 1][d & 1]
    }

    /// Vertex the dart points to.
    pub fn dart_head(&self, d: DartId) -> VertexId {
        self.edges[d >> 1][(d & 1) ^ 1]
    }

    /// The dart of `e` based at `v`, if `v` is an endpoint of `e`.
    pub fn dart_at(&self, e: EdgeId, v: VertexId) -> Option<DartId> {
        let [a, b] = *self.edges.get(e)?;
        if a == v {
            Some(2 * e)
        } else if b == v {
            Some(2 * e + 1)
        } else {
            None
        }
    }

    /// Darts based at `v`, in increasing edge order.
    pub fn darts_at(&self, v: VertexId) -> &[DartId] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence[v].len()
    }

    /// `(edge, neighbor)` pairs around `v`.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (EdgeId, VertexId)> + '_ {
        self.incidence[v]
            .iter()
            .map(move |&d| (d >> 1, self.dart_head(d)))
    }

    pub fn edges_between(&self, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        self.neighbors(u)
            .filter(|&(_, w)| w == v)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        v < self.num_vertices()
    }

    /// Groups of edges sharing an unordered endpoint pair, each sorted,
    /// ordered by their smallest edge id.
    pub fn bundles(&self) -> Vec<Vec<EdgeId>> {
        let mut index = rustc_hash::FxHashMap::default();
        let mut out: Vec<Vec<EdgeId>> = Vec::new();
        for (e, u, v) in self.edges() {
            let key = (u.min(v), u.max(v));
            let slot = *index.entry(key).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[slot].push(e);
        }
        out
    }

    /// Collapses every bundle into its smallest edge.
    pub fn simplify(&self) -> Simplification {
        let bundles = self.bundles();
        let mut graph = MultiGraph::new(self.num_vertices());
        let mut representative = Vec::with_capacity(bundles.len());
        let mut class_of = vec![0; self.num_edges()];
        for (i, bundle) in bundles.iter().enumerate() {
            let (u, v) = self.endpoints(bundle[0]);
            graph.add_edge(u, v).expect("valid edge");
            representative.push(bundle[0]);
            for &e in bundle {
                class_of[e] = i;
            }
        }
        Simplification {
            graph,
            representative,
            class_of,
        }
    }

    pub fn is_simple(&self) -> bool {
        self.bundles().len() == self.num_edges()
    }

    /// Subgraph induced by `vertices`, with local ids in increasing order
    /// of the original ids.
    pub fn induced_subgraph(&self, vertices: &[VertexId]) -> Subgraph {
        let mut vertex_origin = vertices.to_vec();
        vertex_origin.sort_unstable();
        vertex_origin.dedup();
        let mut local = vec![usize::MAX; self.num_vertices()];
        for (i, &v) in vertex_origin.iter().enumerate() {
            local[v] = i;
        }
        let mut graph = MultiGraph::new(vertex_origin.len());
        let mut edge_origin = Vec::new();
        for (e, u, v) in self.edges() {
            if local[u] != usize::MAX && local[v] != usize::MAX {
                graph.add_edge(local[u], local[v]).expect("valid edge");
                edge_origin.push(e);
            }
        }
        Subgraph {
            graph,
            vertex_origin,
            edge_origin,
        }
    }

    /// Subgraph spanned by `edges` (and their endpoints).
    pub fn edge_subgraph(&self, edges: &[EdgeId]) -> Subgraph {
        let mut edge_origin = edges.to_vec();
        edge_origin.sort_unstable();
        edge_origin.dedup();
        let mut vertex_origin: Vec<VertexId> = edge_origin
            .iter()
            .flat_map(|&e| {
                let (u, v) = self.endpoints(e);
                [u, v]
            })
            .collect();
        vertex_origin.sort_unstable();
        vertex_origin.dedup();
        let mut local = vec![usize::MAX; self.num_vertices()];
        for (i, &v) in vertex_origin.iter().enumerate() {
            local[v] = i;
        }
        let mut graph = MultiGraph::new(vertex_origin.len());
        for &e in &edge_origin {
            let (u, v) = self.endpoints(e);
            graph.add_edge(local[u], local[v]).expect("valid edge");
        }
        Subgraph {
            graph,
            vertex_origin,
            edge_origin,
        }
    }

    /// Hop distances from `source`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: VertexId) -> Vec<Option<usize>> {
        self.bfs_limited(source, usize::MAX, |_| true)
    }

    /// BFS from `source` up to depth `limit`, only traversing edges for which
    /// `keep` returns true.
    pub fn bfs_limited(
        &self,
        source: VertexId,
        limit: usize,
        keep: impl Fn(EdgeId) -> bool,
    ) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if du == limit {
                continue;
            }
            for (e, w) in self.neighbors(u) {
                if dist[w].is_none() && keep(e) {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Component label per vertex (labels in order of smallest vertex) and
    /// the number of components, ignoring edges for which `keep` is false.
    pub fn components_filtered(&self, keep: impl Fn(EdgeId) -> bool) -> (Vec<usize>, usize) {
        let n = self.num_vertices();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for (e, w) in self.neighbors(u) {
                    if label[w] == usize::MAX && keep(e) {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn components(&self) -> (Vec<usize>, usize) {
        self.components_filtered(|_| true)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Parses the line-oriented graph format:
    ///
    /// ```text
    /// graph <num_vertices>
    /// e <edge_id> <u> <v>
    /// ```
    ///
    /// Edge ids must be exactly `0..m` in some order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut raw: Vec<(usize, EdgeId, VertexId, VertexId)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse {
                line: lineno,
                msg: msg.to_string(),
            };
            match fields[0] {
                "graph" => {
                    if n.is_some() {
                        return Err(bad("duplicate header"));
                    }
                    if fields.len() != 2 {
                        return Err(bad("expected `graph <num_vertices>`"));
                    }
                    n = Some(parse_num(fields[1], lineno)?);
                }
                "e" => {
                    if n.is_none() {
                        return Err(bad("edge before header"));
                    }
                    if fields.len() != 4 {
                        return Err(bad("expected `e <edge_id> <u> <v>`"));
                    }
                    raw.push((
                        lineno,
                        parse_num(fields[1], lineno)?,
                        parse_num(fields[2], lineno)?,
                        parse_num(fields[3], lineno)?,
                    ));
                }
                other => return Err(bad(&format!("unknown record `{other}`"))),
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            msg: "missing `graph` header".into(),
        })?;
        let m = raw.len();
        let mut slots: Vec<Option<(VertexId, VertexId)>> = vec![None; m];
        for &(lineno, id, u, v) in &raw {
            if id >= m {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("edge id {id} out of range 0..{m}"),
                });
            }
            if slots[id].replace((u, v)).is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("duplicate edge id {id}"),
                });
            }
        }
        let mut g = MultiGraph::new(n);
        for (id, slot) in slots.into_iter().enumerate() {
            let (u, v) = slot.expect("all ids present");
            g.add_edge(u, v).map_err(|err| Error::Parse {
                line: raw.iter().find(|r| r.1 == id).map_or(0, |r| r.0),
                msg: err.to_string(),
            })?;
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("graph {}\n", self.num_vertices());
        for (e, u, v) in self.edges() {
            writeln!(out, "e {e} {u} {v}").unwrap();
        }
        out
    }
}

fn parse_num(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a non-negative integer, got `{s}`"),
    })
}

/// A simple graph obtained by collapsing parallel bundles.
#[derive(Clone, Debug)]
pub struct Simplification {
    pub graph: MultiGraph,
    /// Simple edge -> smallest original edge of its bundle.
    pub representative: Vec<EdgeId>,
    /// Original edge -> simple edge.
    pub class_of: Vec<EdgeId>,
}

/// A subgraph with explicit maps from local ids back to the parent graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: MultiGraph,
    pub vertex_origin: Vec<VertexId>,
    pub edge_origin: Vec<EdgeId>,
}

impl Subgraph {
    pub fn local_vertex(&self, original: VertexId) -> Option<VertexId> {
        self.vertex_origin.binary_search(&original).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    pub graph: MultiGraph,
    pub root: VertexId,
}

impl RootedGraph {
    pub fn new(graph: MultiGraph, root: VertexId) -> Result<Self> {
        if !graph.has_vertex(root) {
            return Err(Error::UnknownVertex(root));
        }
        Ok(RootedGraph { graph, root })
    }
}

/// Induced ball around a vertex.
#[derive(Clone, Debug)]
pub struct Ball {
    pub subgraph: Subgraph,
    /// Local id of the center.
    pub root: VertexId,
    /// Distance from the center, indexed by local vertex id.
    pub distance: Vec<usize>,
}

impl Ball {
    pub fn rooted(&self) -> RootedGraph {
        RootedGraph {
            graph: self.subgraph.graph.clone(),
            root: self.root,
        }
    }
}

pub fn ball(g: &MultiGraph, x: VertexId, r: usize) -> Result<Ball> {
    if !g.has_vertex(x) {
        return Err(Error::UnknownVertex(x));
    }
    let dist = g.bfs_limited(x, r, |_| true);
    let inside: Vec<VertexId> = (0..g.num_vertices()).filter(|&v| dist[v].is_some()).collect();
    let subgraph = g.induced_subgraph(&inside);
    let distance = subgraph
        .vertex_origin
        .iter()
        .map(|&v| dist[v].unwrap())
        .collect();
    let root = subgraph.local_vertex(x).unwrap();
    Ok(Ball {
        subgraph,
        root,
        distance,
    })
}

/// Simple graph on `V(g)` joining vertices at distance `1..=radius`.
pub fn r_closure(g: &MultiGraph, radius: usize) -> MultiGraph {
    let mut out = MultiGraph::new(g.num_vertices());
    for u in 0..g.num_vertices() {
        let dist = g.bfs_limited(u, radius, |_| true);
        for (v, d) in dist.iter().enumerate().skip(u + 1) {
            if matches!(d, Some(d) if *d >= 1) {
                out.add_edge(u, v).expect("valid edge");
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    pub cutvertices: Vec<VertexId>,
}

pub fn blocks_and_cutvertices(g: &MultiGraph) -> Result<BlockDecomposition> {
    if g.num_vertices() == 0 {
        return Err(Error::Empty("graph has no vertices"));
    }
    let low = lowpoint(g, None);
    if low.components != 1 {
        return Err(Error::Disconnected);
    }
    let mut blocks: Vec<Block> = low
        .blocks
        .into_iter()
        .map(|mut edges| {
            edges.sort_unstable();
            let mut vertices: Vec<VertexId> = edges
                .iter()
                .flat_map(|&e| {
                    let (u, v) = g.endpoints(e);
                    [u, v]
                })
                .collect();
            vertices.sort_unstable();
            vertices.dedup();
            Block { vertices, edges }
        })
        .collect();
    if g.num_edges() == 0 {
        blocks.push(Block {
            vertices: vec![0],
            edges: vec![],
        });
    }
    blocks.sort_by(|a, b| a.edges.cmp(&b.edges));
    let cutvertices = (0..g.num_vertices()).filter(|&v| low.is_cut[v]).collect();
    Ok(BlockDecomposition {
        blocks,
        cutvertices,
    })
}

pub(crate) struct Lowpoint {
    pub blocks: Vec<Vec<EdgeId>>,
    pub is_cut: Vec<bool>,
    /// Number of connected components among non-excluded vertices.
    pub components: usize,
}

/// Iterative Hopcroft–Tarjan biconnectivity, optionally pretending that
/// `excluded` has been deleted.
pub(crate) fn lowpoint(g: &MultiGraph, excluded: Option<VertexId>) -> Lowpoint {
    let n = g.num_vertices();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut blocks = Vec::new();
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut components = 0;
    let mut time = 0;
    // (vertex, edge used to enter, next incidence index)
    let mut frames: Vec<(VertexId, Option<EdgeId>, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX || Some(root) == excluded {
            continue;
        }
        components += 1;
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        frames.push((root, None, 0));
        while let Some(frame) = frames.last_mut() {
            let (v, parent_edge, idx) = *frame;
            if idx < g.degree(v) {
                frame.2 += 1;
                let d = g.darts_at(v)[idx];
                let e = dart_edge(d);
                let w = g.dart_head(d);
                if Some(e) == parent_edge || Some(w) == excluded {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    frames.push((w, Some(e), 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                frames.pop();
                if let Some(&(u, _, _)) = frames.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        if u != root {
                            is_cut[u] = true;
                        }
                        let entry = parent_edge.expect("non-root frame has a parent edge");
                        let mut block = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            block.push(e);
                            if e == entry {
                                break;
                            }
                        }
                        blocks.push(block);
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    Lowpoint {
        blocks,
        is_cut,
        components,
    }
}

/// Vertex connectivity test on the simplification of `g`: at least `k + 1`
/// vertices and no separating set of fewer than `k` vertices.
pub fn is_k_connected(g: &MultiGraph, k: usize) -> bool {
    let simple = g.simplify().graph;
    let n = simple.num_vertices();
    if n < k + 1 {
        return false;
    }
    match k {
        0 => true,
        1 => simple.is_connected(),
        2 => {
            let low = lowpoint(&simple, None);
            low.components == 1 && !low.is_cut.iter().any(|&c| c)
        }
        3 => {
            let low = lowpoint(&simple, None);
            if low.components != 1 || low.is_cut.iter().any(|&c| c) {
                return false;
            }
            (0..n).all(|x| {
                let low = lowpoint(&simple, Some(x));
                low.components == 1 && !low.is_cut.iter().any(|&c| c)
            })
        }
        _ => brute_force_k_connected(&simple, k),
    }
}

fn brute_force_k_connected(g: &MultiGraph, k: usize) -> bool {
    let n = g.num_vertices();
    let mut chosen = Vec::new();
    fn rec(g: &MultiGraph, k: usize, start: usize, chosen: &mut Vec<VertexId>) -> bool {
        if !connected_without(g, chosen) {
            return false;
        }
        if chosen.len() + 1 == k {
            return true;
        }
        for v in start..g.num_vertices() {
            chosen.push(v);
            let ok = rec(g, k, v + 1, chosen);
            chosen.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    n > k && rec(g, k, 0, &mut chosen)
}

pub(crate) fn connected_without(g: &MultiGraph, removed: &[VertexId]) -> bool {
    let n = g.num_vertices();
    let mut dead = vec![false; n];
    for &v in removed {
        dead[v] = true;
    }
    let Some(start) = (0..n).find(|&v| !dead[v]) else {
        return true;
    };
    let mut seen = dead.clone();
    seen[start] = true;
    let mut stack = vec![start];
    let mut reached = 1;
    while let Some(u) = stack.pop() {
        for (_, w) in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                stack.push(w);
            }
        }
    }
    reached == n - removed.len()
}
