//! 3-block trees of 2-connected multigraphs and their reconstruction by
//! edge amalgams.
//!
//! A 2-connected multigraph is split recursively at separation pairs, each
//! split adding a matched pair of virtual edges. Adjacent bonds and adjacent
//! polygons are then merged, which yields the unique tree whose nodes are
//! cycles, multilinks and 3-connected graphs.

use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::multigraph::{lowpoint, EdgeId, MultiGraph, VertexId};
use crate::rotation::RotationSystem;
use crate::seed::rng_for;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockKind {
    Cycle,
    Multilink,
    ThreeConnected,
}

impl BlockKind {
    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Cycle => "cycle",
            BlockKind::Multilink => "multilink",
            BlockKind::ThreeConnected => "three_connected",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        match s {
            "cycle" => Some(BlockKind::Cycle),
            "multilink" => Some(BlockKind::Multilink),
            "three_connected" => Some(BlockKind::ThreeConnected),
            _ => None,
        }
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    Real(EdgeId),
    /// Virtual edge matched through the tree link with this index.
    Virtual(usize),
}

/// Oriented choice of one edge in each of two graphs to glue along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AmalgamSpec {
    pub fa: EdgeId,
    pub fa_tail: VertexId,
    pub fa_head: VertexId,
    pub fb: EdgeId,
    pub fb_tail: VertexId,
    pub fb_head: VertexId,
}

/// Result of an edge amalgam with the maps from both inputs.
#[derive(Clone, Debug)]
pub struct Amalgam {
    pub graph: MultiGraph,
    pub a_vertex: Vec<VertexId>,
    pub b_vertex: Vec<VertexId>,
    pub a_edge: Vec<Option<EdgeId>>,
    pub b_edge: Vec<Option<EdgeId>>,
}

/// Glues `a` and `b` by identifying `fa_tail` with `fb_tail` and `fa_head`
/// with `fb_head`, then deleting `fa` and `fb`. Vertices of `a` keep their
/// ids; edges of `a` come first, both in their original order.
pub fn edge_amalgam(a: &MultiGraph, b: &MultiGraph, spec: &AmalgamSpec) -> Result<Amalgam> {
    let check = |g: &MultiGraph, e: EdgeId, t: VertexId, h: VertexId, side: &str| {
        if e >= g.num_edges() {
            return Err(Error::InvalidAmalgam(format!("edge {e} not in {side}")));
        }
        let (u, v) = g.endpoints(e);
        if (u, v) != (t, h) && (u, v) != (h, t) {
            return Err(Error::InvalidAmalgam(format!(
                "({t}, {h}) are not the endpoints of edge {e} in {side}"
            )));
        }
        Ok(())
    };
    check(a, spec.fa, spec.fa_tail, spec.fa_head, "A")?;
    check(b, spec.fb, spec.fb_tail, spec.fb_head, "B")?;

    let mut graph = MultiGraph::new(a.num_vertices());
    let a_vertex: Vec<VertexId> = (0..a.num_vertices()).collect();
    let mut b_vertex = vec![0; b.num_vertices()];
    for (v, slot) in b_vertex.iter_mut().enumerate() {
        *slot = if v == spec.fb_tail {
            spec.fa_tail
        } else if v == spec.fb_head {
            spec.fa_head
        } else {
            graph.add_vertex()
        };
    }
    let mut a_edge = vec![None; a.num_edges()];
    for (e, u, v) in a.edges() {
        if e != spec.fa {
            a_edge[e] = Some(graph.add_edge(u, v)?);
        }
    }
    let mut b_edge = vec![None; b.num_edges()];
    for (e, u, v) in b.edges() {
        if e != spec.fb {
            b_edge[e] = Some(graph.add_edge(b_vertex[u], b_vertex[v])?);
        }
    }
    Ok(Amalgam {
        graph,
        a_vertex,
        b_vertex,
        a_edge,
        b_edge,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeBlock {
    pub kind: BlockKind,
    /// Local graph; local vertex ids increase with `vertex_origin`.
    pub graph: MultiGraph,
    pub vertex_origin: Vec<VertexId>,
    pub labels: Vec<EdgeLabel>,
}

impl TreeBlock {
    pub fn real_edges(&self) -> Vec<EdgeId> {
        self.labels
            .iter()
            .filter_map(|l| match l {
                EdgeLabel::Real(e) => Some(*e),
                EdgeLabel::Virtual(_) => None,
            })
            .collect()
    }

    pub fn num_virtual(&self) -> usize {
        self.labels.iter().filter(|l| matches!(l, EdgeLabel::Virtual(_))).count()
    }

    pub fn local_edge(&self, label: EdgeLabel) -> Option<EdgeId> {
        self.labels.iter().position(|&l| l == label)
    }
}

/// Link between two blocks: `fa` in block `a` is glued to `fb` in block `b`,
/// tails together and heads together. All ids are block-local.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeLink {
    pub a: usize,
    pub b: usize,
    pub fa: EdgeId,
    pub fa_tail: VertexId,
    pub fa_head: VertexId,
    pub fb: EdgeId,
    pub fb_tail: VertexId,
    pub fb_head: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeBlockTree {
    /// Vertex and edge counts of the decomposed graph.
    pub num_vertices: usize,
    pub num_edges: usize,
    pub blocks: Vec<TreeBlock>,
    pub links: Vec<TreeLink>,
}

/// Working component during splitting: edges as (origin u, origin v, label).
#[derive(Clone, Debug)]
struct SplitPiece {
    edges: Vec<(VertexId, VertexId, SplitLabel)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum SplitLabel {
    Real(EdgeId),
    Virtual(usize),
}

struct LocalView {
    graph: MultiGraph,
    origin: Vec<VertexId>,
}

impl SplitPiece {
    fn local(&self) -> LocalView {
        let mut origin: Vec<VertexId> = self.edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
        origin.sort_unstable();
        origin.dedup();
        let mut graph = MultiGraph::new(origin.len());
        for &(u, v, _) in &self.edges {
            let lu = origin.binary_search(&u).unwrap();
            let lv = origin.binary_search(&v).unwrap();
            graph.add_edge(lu, lv).expect("pieces have no loops");
        }
        LocalView { graph, origin }
    }

    fn kind(&self) -> BlockKind {
        let view = self.local();
        classify(&view.graph)
    }
}

fn classify(g: &MultiGraph) -> BlockKind {
    if g.num_vertices() == 2 {
        BlockKind::Multilink
    } else if (0..g.num_vertices()).all(|v| g.degree(v) == 2) {
        BlockKind::Cycle
    } else {
        BlockKind::ThreeConnected
    }
}

/// Classes of edges with respect to the vertex pair `{a, b}`: each edge
/// joining `a` and `b` alone, and the edges of each component of
/// `g - {a, b}` together with their attachments.
fn separation_classes(g: &MultiGraph, a: VertexId, b: VertexId) -> Vec<Vec<EdgeId>> {
    let n = g.num_vertices();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for s in 0..n {
        if s == a || s == b || comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for (_, w) in g.neighbors(x) {
                if w != a && w != b && comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    let mut direct = Vec::new();
    let mut by_comp: Vec<Vec<EdgeId>> = vec![Vec::new(); count];
    for (e, u, v) in g.edges() {
        let inner = if u != a && u != b {
            Some(u)
        } else if v != a && v != b {
            Some(v)
        } else {
            None
        };
        match inner {
            Some(x) => by_comp[comp[x]].push(e),
            None => direct.push(vec![e]),
        }
    }
    direct.extend(by_comp);
    direct
}

fn is_separating(classes: &[Vec<EdgeId>]) -> bool {
    match classes.len() {
        0 | 1 => false,
        2 => classes.iter().all(|c| c.len() >= 2),
        3 => classes.iter().any(|c| c.len() >= 2),
        _ => true,
    }
}

/// Finds a separation pair of a 2-connected multigraph with at least three
/// vertices that is not a cycle.
fn find_separation_pair(g: &MultiGraph) -> Option<(VertexId, VertexId, Vec<Vec<EdgeId>>)> {
    for bundle in g.bundles() {
        if bundle.len() >= 2 {
            let (a, b) = g.endpoints(bundle[0]);
            let classes = separation_classes(g, a, b);
            if is_separating(&classes) {
                return Some((a, b, classes));
            }
        }
    }
    for a in 0..g.num_vertices() {
        let low = lowpoint(g, Some(a));
        if let Some(b) = (0..g.num_vertices()).find(|&b| b != a && low.is_cut[b]) {
            let classes = separation_classes(g, a, b);
            debug_assert!(is_separating(&classes));
            return Some((a, b, classes));
        }
    }
    None
}

/// Reference search over all vertex pairs, kept for cross-checking.
#[cfg(test)]
fn find_separation_pair_brute(g: &MultiGraph) -> Option<(VertexId, VertexId)> {
    for a in 0..g.num_vertices() {
        for b in a + 1..g.num_vertices() {
            if is_separating(&separation_classes(g, a, b)) {
                return Some((a, b));
            }
        }
    }
    None
}

fn is_biconnected_multigraph(g: &MultiGraph) -> bool {
    if g.num_vertices() < 2 {
        return false;
    }
    let low = lowpoint(g, None);
    low.components == 1 && !low.is_cut.iter().any(|&c| c)
}

/// 3-block tree of a 2-connected multigraph with at least 3 edges.
pub fn decompose_3blocks(g: &MultiGraph) -> Result<ThreeBlockTree> {
    if !is_biconnected_multigraph(g) {
        return Err(Error::NotKConnected(2));
    }
    if g.num_edges() < 3 {
        return Err(Error::TooFewEdges(g.num_edges()));
    }
    let whole = SplitPiece {
        edges: g.edges().map(|(e, u, v)| (u, v, SplitLabel::Real(e))).collect(),
    };
    let mut pending = vec![whole];
    let mut done: Vec<SplitPiece> = Vec::new();
    let mut next_virtual = 0;
    while let Some(piece) = pending.pop() {
        let view = piece.local();
        if classify(&view.graph) != BlockKind::ThreeConnected {
            done.push(piece);
            continue;
        }
        let Some((a, b, classes)) = find_separation_pair(&view.graph) else {
            done.push(piece);
            continue;
        };
        let chosen = classes
            .iter()
            .position(|c| c.len() >= 2)
            .expect("a separating class has at least two edges");
        let vid = next_virtual;
        next_virtual += 1;
        let (oa, ob) = (view.origin[a], view.origin[b]);
        let mut inside = vec![false; piece.edges.len()];
        for &e in &classes[chosen] {
            inside[e] = true;
        }
        let mut left = SplitPiece { edges: Vec::new() };
        let mut right = SplitPiece { edges: Vec::new() };
        for (e, &edge) in piece.edges.iter().enumerate() {
            if inside[e] {
                left.edges.push(edge);
            } else {
                right.edges.push(edge);
            }
        }
        left.edges.push((oa, ob, SplitLabel::Virtual(vid)));
        right.edges.push((oa, ob, SplitLabel::Virtual(vid)));
        pending.push(left);
        pending.push(right);
    }

    merge_same_kind(&mut done);
    Ok(canonical_tree(g, done))
}

/// Merges adjacent bonds and adjacent polygons until none remain.
fn merge_same_kind(pieces: &mut Vec<SplitPiece>) {
    loop {
        let kinds: Vec<BlockKind> = pieces.iter().map(SplitPiece::kind).collect();
        let mut holder: rustc_hash::FxHashMap<usize, Vec<usize>> = Default::default();
        for (i, p) in pieces.iter().enumerate() {
            for &(_, _, l) in &p.edges {
                if let SplitLabel::Virtual(v) = l {
                    holder.entry(v).or_default().push(i);
                }
            }
        }
        let mut candidates: Vec<(usize, usize, usize)> = holder
            .iter()
            .filter(|(_, h)| h.len() == 2)
            .map(|(&v, h)| (v, h[0], h[1]))
            .filter(|&(_, i, j)| kinds[i] == kinds[j] && kinds[i] != BlockKind::ThreeConnected)
            .collect();
        candidates.sort_unstable();
        let Some(&(vid, i, j)) = candidates.first() else {
            return;
        };
        let keep = |&(_, _, l): &(VertexId, VertexId, SplitLabel)| l != SplitLabel::Virtual(vid);
        let mut merged: Vec<_> = pieces[i].edges.iter().copied().filter(keep).collect();
        merged.extend(pieces[j].edges.iter().copied().filter(keep));
        let (lo, hi) = (i.min(j), i.max(j));
        pieces.swap_remove(hi);
        pieces[lo] = SplitPiece { edges: merged };
    }
}

fn canonical_tree(g: &MultiGraph, pieces: Vec<SplitPiece>) -> ThreeBlockTree {
    struct Draft {
        kind: BlockKind,
        reals: Vec<EdgeId>,
        origin: Vec<VertexId>,
        piece: SplitPiece,
    }
    let mut drafts: Vec<Draft> = pieces
        .into_iter()
        .map(|piece| {
            let view = piece.local();
            let mut reals: Vec<EdgeId> = piece
                .edges
                .iter()
                .filter_map(|&(_, _, l)| match l {
                    SplitLabel::Real(e) => Some(e),
                    SplitLabel::Virtual(_) => None,
                })
                .collect();
            reals.sort_unstable();
            Draft {
                kind: classify(&view.graph),
                reals,
                origin: view.origin,
                piece,
            }
        })
        .collect();
    drafts.sort_by(|x, y| (x.kind, &x.reals, &x.origin).cmp(&(y.kind, &y.reals, &y.origin)));

    // virtual pair id -> the two blocks holding it, in block order
    let mut holders: rustc_hash::FxHashMap<usize, Vec<usize>> = Default::default();
    for (i, d) in drafts.iter().enumerate() {
        for &(_, _, l) in &d.piece.edges {
            if let SplitLabel::Virtual(v) = l {
                holders.entry(v).or_default().push(i);
            }
        }
    }
    let mut pairs: Vec<(usize, usize, usize)> = holders
        .iter()
        .map(|(&v, h)| (h[0].min(h[1]), h[0].max(h[1]), v))
        .collect();
    pairs.sort_unstable();
    let link_of: rustc_hash::FxHashMap<usize, usize> =
        pairs.iter().enumerate().map(|(l, &(_, _, v))| (v, l)).collect();

    let mut blocks = Vec::with_capacity(drafts.len());
    for (i, d) in drafts.iter().enumerate() {
        let local = |o: VertexId| d.origin.binary_search(&o).unwrap();
        let mut reals: Vec<(EdgeId, VertexId, VertexId)> = Vec::new();
        let mut virtuals: Vec<((VertexId, VertexId), usize, usize)> = Vec::new();
        for &(u, v, l) in &d.piece.edges {
            match l {
                SplitLabel::Real(e) => {
                    let (gu, gv) = g.endpoints(e);
                    reals.push((e, local(gu), local(gv)));
                }
                SplitLabel::Virtual(vid) => {
                    let link = link_of[&vid];
                    let (a, b) = (pairs[link].0, pairs[link].1);
                    let partner = if a == i { b } else { a };
                    virtuals.push(((u.min(v), u.max(v)), partner, link));
                }
            }
        }
        reals.sort_unstable();
        virtuals.sort_unstable();
        let mut graph = MultiGraph::new(d.origin.len());
        let mut labels = Vec::new();
        for &(e, lu, lv) in &reals {
            graph.add_edge(lu, lv).unwrap();
            labels.push(EdgeLabel::Real(e));
        }
        for &((ou, ov), _, link) in &virtuals {
            graph.add_edge(local(ou), local(ov)).unwrap();
            labels.push(EdgeLabel::Virtual(link));
        }
        blocks.push(TreeBlock {
            kind: d.kind,
            graph,
            vertex_origin: d.origin.clone(),
            labels,
        });
    }

    let links = pairs
        .iter()
        .enumerate()
        .map(|(l, &(a, b, _))| {
            let fa = blocks[a].local_edge(EdgeLabel::Virtual(l)).unwrap();
            let fb = blocks[b].local_edge(EdgeLabel::Virtual(l)).unwrap();
            let (fa_tail, fa_head) = blocks[a].graph.endpoints(fa);
            let (fb_tail, fb_head) = blocks[b].graph.endpoints(fb);
            debug_assert_eq!(
                blocks[a].vertex_origin[fa_tail],
                blocks[b].vertex_origin[fb_tail]
            );
            TreeLink {
                a,
                b,
                fa,
                fa_tail,
                fa_head,
                fb,
                fb_tail,
                fb_head,
            }
        })
        .collect();
    ThreeBlockTree {
        num_vertices: g.num_vertices(),
        num_edges: g.num_edges(),
        blocks,
        links,
    }
}

/// A block graph together with the bookkeeping needed to fold a tree.
#[derive(Clone, Debug)]
pub(crate) struct Piece {
    pub graph: MultiGraph,
    pub rs: Option<RotationSystem>,
    pub labels: Vec<EdgeLabel>,
    /// Smallest (block, local vertex) identified into each vertex.
    pub keys: Vec<(usize, VertexId)>,
}

/// Amalgamates all blocks along the links in `order`. Rotations, when
/// given, are merged along the way.
pub(crate) fn fold_links(
    tree: &ThreeBlockTree,
    rotations: Option<&[RotationSystem]>,
    order: &[usize],
) -> Result<Piece> {
    if tree.blocks.is_empty() {
        return Err(Error::InvalidBlockTree("no blocks".into()));
    }
    let mut slots: Vec<Option<Piece>> = tree
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            Some(Piece {
                graph: b.graph.clone(),
                rs: rotations.map(|r| r[i].clone()),
                labels: b.labels.clone(),
                keys: (0..b.graph.num_vertices()).map(|v| (i, v)).collect(),
            })
        })
        .collect();
    let mut parent: Vec<usize> = (0..tree.blocks.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &l in order {
        let link = tree
            .links
            .get(l)
            .ok_or_else(|| Error::InvalidBlockTree(format!("no link {l}")))?;
        let (pa, pb) = (find(&mut parent, link.a), find(&mut parent, link.b));
        if pa == pb {
            return Err(Error::InvalidBlockTree(format!("link {l} closes a cycle")));
        }
        let a = slots[pa].take().unwrap();
        let b = slots[pb].take().unwrap();
        let locate = |piece: &Piece, block: usize, fe: EdgeId, tail: VertexId| -> Result<(EdgeId, VertexId, VertexId)> {
            let e = piece
                .labels
                .iter()
                .position(|&x| x == EdgeLabel::Virtual(l))
                .ok_or_else(|| Error::InvalidBlockTree(format!("link {l} has no virtual edge")))?;
            let (u, v) = piece.graph.endpoints(e);
            // amalgams keep edge orientation, so compare with the block
            let flipped = tree.blocks[block].graph.endpoints(fe).0 != tail;
            Ok(if flipped { (e, v, u) } else { (e, u, v) })
        };
        let (fa, fa_tail, fa_head) = locate(&a, link.a, link.fa, link.fa_tail)?;
        let (fb, fb_tail, fb_head) = locate(&b, link.b, link.fb, link.fb_tail)?;
        let spec = AmalgamSpec {
            fa,
            fa_tail,
            fa_head,
            fb,
            fb_tail,
            fb_head,
        };
        let amalgam = edge_amalgam(&a.graph, &b.graph, &spec)?;
        let rs = match (&a.rs, &b.rs) {
            (Some(ra), Some(rb)) => Some(crate::amalgam_embed::merged_rotation(
                &a.graph, ra, &b.graph, rb, &spec, &amalgam,
            )?),
            _ => None,
        };
        let mut labels = vec![EdgeLabel::Real(0); amalgam.graph.num_edges()];
        for (e, img) in amalgam.a_edge.iter().enumerate() {
            if let Some(x) = img {
                labels[*x] = a.labels[e];
            }
        }
        for (e, img) in amalgam.b_edge.iter().enumerate() {
            if let Some(x) = img {
                labels[*x] = b.labels[e];
            }
        }
        let mut keys = a.keys.clone();
        keys.resize(amalgam.graph.num_vertices(), (usize::MAX, 0));
        for (v, &img) in amalgam.b_vertex.iter().enumerate() {
            keys[img] = keys[img].min(b.keys[v]);
        }
        slots[pa] = Some(Piece {
            graph: amalgam.graph,
            rs,
            labels,
            keys,
        });
        parent[pb] = pa;
    }
    let root = find(&mut parent, 0);
    if (0..tree.blocks.len()).any(|i| find(&mut parent, i) != root) {
        return Err(Error::InvalidBlockTree("links do not connect all blocks".into()));
    }
    Ok(slots[root].take().unwrap())
}

/// Relabels a fully folded piece: vertices by key, edges by real id.
pub(crate) fn canonicalize(piece: &Piece) -> Result<(MultiGraph, Option<RotationSystem>, Vec<(usize, VertexId)>)> {
    let mut vorder: Vec<VertexId> = (0..piece.graph.num_vertices()).collect();
    vorder.sort_by_key(|&v| piece.keys[v]);
    let mut vnew = vec![0; vorder.len()];
    for (i, &v) in vorder.iter().enumerate() {
        vnew[v] = i;
    }
    let mut eorder: Vec<(EdgeId, EdgeId)> = Vec::with_capacity(piece.labels.len());
    for (e, l) in piece.labels.iter().enumerate() {
        match l {
            EdgeLabel::Real(id) => eorder.push((*id, e)),
            EdgeLabel::Virtual(_) => {
                return Err(Error::InvalidBlockTree("unmatched virtual edge".into()))
            }
        }
    }
    eorder.sort_unstable();
    if eorder.iter().enumerate().any(|(i, &(id, _))| id != i) {
        return Err(Error::InvalidBlockTree("real edge ids are not 0..m".into()));
    }
    let mut graph = MultiGraph::new(vorder.len());
    for &(_, e) in &eorder {
        let (u, v) = piece.graph.endpoints(e);
        graph.add_edge(vnew[u], vnew[v])?;
    }
    let rs = match &piece.rs {
        Some(rs) => {
            let mut dnew = vec![0; piece.graph.num_darts()];
            for &(id, e) in &eorder {
                dnew[2 * e] = 2 * id;
                dnew[2 * e + 1] = 2 * id + 1;
            }
            let orders: Vec<Vec<usize>> = vorder
                .iter()
                .map(|&v| rs.rotation_at(v).into_iter().map(|d| dnew[d]).collect())
                .collect();
            Some(RotationSystem::from_cyclic_orders(&graph, &orders)?)
        }
        None => None,
    };
    let keys = vorder.iter().map(|&v| piece.keys[v]).collect();
    Ok((graph, rs, keys))
}

impl ThreeBlockTree {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn count_kind(&self, kind: BlockKind) -> usize {
        self.blocks.iter().filter(|b| b.kind == kind).count()
    }

    /// Blocks adjacent to `block` in the tree.
    pub fn neighbors(&self, block: usize) -> Vec<usize> {
        self.links
            .iter()
            .filter_map(|l| {
                if l.a == block {
                    Some(l.b)
                } else if l.b == block {
                    Some(l.a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Original vertex of a (block, local vertex) key.
    pub fn origin(&self, key: (usize, VertexId)) -> VertexId {
        self.blocks[key.0].vertex_origin[key.1]
    }

    /// Checks the structural invariants of a 3-block tree.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidBlockTree(m));
        if self.blocks.is_empty() {
            return bad("no blocks".into());
        }
        if self.links.len() + 1 != self.blocks.len() {
            return bad(format!("{} blocks but {} links", self.blocks.len(), self.links.len()));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if b.graph.num_edges() < 3 {
                return bad(format!("block {i} has fewer than 3 edges"));
            }
            if b.labels.len() != b.graph.num_edges() || b.vertex_origin.len() != b.graph.num_vertices() {
                return bad(format!("block {i} has inconsistent maps"));
            }
            let kind = classify(&b.graph);
            let ok = match b.kind {
                BlockKind::Cycle | BlockKind::Multilink => kind == b.kind,
                BlockKind::ThreeConnected => {
                    kind == BlockKind::ThreeConnected
                        && b.graph.is_simple()
                        && crate::multigraph::is_k_connected(&b.graph, 3)
                }
            };
            if !ok {
                return bad(format!("block {i} is not a valid {}", b.kind));
            }
        }
        let mut used = vec![0usize; self.links.len()];
        for b in &self.blocks {
            for l in &b.labels {
                if let EdgeLabel::Virtual(x) = l {
                    if *x >= self.links.len() {
                        return bad(format!("virtual edge refers to missing link {x}"));
                    }
                    used[*x] += 1;
                }
            }
        }
        if used.iter().any(|&c| c != 2) {
            return bad("every link must match exactly two virtual edges".into());
        }
        for (i, l) in self.links.iter().enumerate() {
            if l.a >= self.blocks.len() || l.b >= self.blocks.len() || l.a == l.b {
                return bad(format!("link {i} has invalid blocks"));
            }
            let (ba, bb) = (&self.blocks[l.a], &self.blocks[l.b]);
            if ba.kind == bb.kind && ba.kind != BlockKind::ThreeConnected {
                return bad(format!("link {i} joins two blocks of kind {}", ba.kind));
            }
            if ba.labels.get(l.fa) != Some(&EdgeLabel::Virtual(i))
                || bb.labels.get(l.fb) != Some(&EdgeLabel::Virtual(i))
            {
                return bad(format!("link {i} does not name its virtual edges"));
            }
            let ends = |g: &MultiGraph, e, t, h| {
                let (u, v) = g.endpoints(e);
                (u, v) == (t, h) || (u, v) == (h, t)
            };
            if !ends(&ba.graph, l.fa, l.fa_tail, l.fa_head) || !ends(&bb.graph, l.fb, l.fb_tail, l.fb_head) {
                return bad(format!("link {i} has wrong endpoints"));
            }
        }
        let order: Vec<usize> = (0..self.links.len()).collect();
        fold_links(self, None, &order).map(|_| ())
    }

    /// Text form: header `blocktree <n> <m>`, then per block `block <id>
    /// <kind>` followed by `e <id> <u> <v>` lines in original vertex ids and
    /// `vedge <block> <id>` flags, then `tlink` lines. Virtual edges of link
    /// `l` get ids `m + 2l` (in block `a`) and `m + 2l + 1` (in block `b`).
    pub fn to_text(&self) -> String {
        let m = self.num_edges;
        let mut out = format!("blocktree {} {}\n", self.num_vertices, m);
        let global = |block: usize, e: EdgeId| -> usize {
            match self.blocks[block].labels[e] {
                EdgeLabel::Real(id) => id,
                EdgeLabel::Virtual(l) => m + 2 * l + usize::from(self.links[l].a != block),
            }
        };
        for (i, b) in self.blocks.iter().enumerate() {
            writeln!(out, "block {i} {}", b.kind).unwrap();
            for (e, u, v) in b.graph.edges() {
                writeln!(out, "e {} {} {}", global(i, e), b.vertex_origin[u], b.vertex_origin[v]).unwrap();
            }
            for e in 0..b.graph.num_edges() {
                if matches!(b.labels[e], EdgeLabel::Virtual(_)) {
                    writeln!(out, "vedge {i} {}", global(i, e)).unwrap();
                }
            }
        }
        for l in &self.links {
            let (ba, bb) = (&self.blocks[l.a], &self.blocks[l.b]);
            writeln!(
                out,
                "tlink {} {} {} {} {} {} {} {}",
                l.a,
                l.b,
                global(l.a, l.fa),
                ba.vertex_origin[l.fa_tail],
                ba.vertex_origin[l.fa_head],
                global(l.b, l.fb),
                bb.vertex_origin[l.fb_tail],
                bb.vertex_origin[l.fb_head]
            )
            .unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        type RawBlock = (BlockKind, Vec<(usize, VertexId, VertexId)>, Vec<usize>);
        let mut header = None;
        let mut raw: Vec<RawBlock> = Vec::new();
        let mut raw_links: Vec<[usize; 8]> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: lineno,
                msg: msg.to_string(),
            };
            let mut parts = content.split_whitespace();
            let tag = parts.next().unwrap();
            let rest: Vec<&str> = parts.collect();
            let nums = || -> Result<Vec<usize>> {
                rest.iter()
                    .map(|s| s.parse().map_err(|_| bad(&format!("bad number `{s}`"))))
                    .collect()
            };
            match tag {
                "blocktree" => {
                    let v = nums()?;
                    if v.len() != 2 || header.is_some() {
                        return Err(bad("expected one `blocktree <n> <m>` header"));
                    }
                    header = Some((v[0], v[1]));
                }
                "block" => {
                    if rest.len() != 2 {
                        return Err(bad("expected `block <id> <kind>`"));
                    }
                    let id: usize = rest[0].parse().map_err(|_| bad("bad block id"))?;
                    if id != raw.len() {
                        return Err(bad("block ids must be consecutive from 0"));
                    }
                    let kind = BlockKind::from_name(rest[1]).ok_or_else(|| bad("unknown block kind"))?;
                    raw.push((kind, Vec::new(), Vec::new()));
                }
                "e" => {
                    let v = nums()?;
                    let block = raw.last_mut().ok_or_else(|| bad("edge before any block"))?;
                    if v.len() != 3 {
                        return Err(bad("expected `e <id> <u> <v>`"));
                    }
                    block.1.push((v[0], v[1], v[2]));
                }
                "vedge" => {
                    let v = nums()?;
                    if v.len() != 2 || v[0] >= raw.len() {
                        return Err(bad("expected `vedge <block> <id>`"));
                    }
                    raw[v[0]].2.push(v[1]);
                }
                "tlink" => {
                    let v = nums()?;
                    if v.len() != 8 {
                        return Err(bad("expected 8 fields after `tlink`"));
                    }
                    raw_links.push(v.try_into().unwrap());
                }
                _ => return Err(bad("unknown line tag")),
            }
        }
        let (num_vertices, num_edges) = header.ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let invalid = |m: String| Error::InvalidBlockTree(m);
        let mut blocks = Vec::new();
        let mut local_of_edge: Vec<rustc_hash::FxHashMap<usize, usize>> = Vec::new();
        for (i, (kind, edges, vedges)) in raw.iter().enumerate() {
            let mut origin: Vec<VertexId> = edges.iter().flat_map(|&(_, u, v)| [u, v]).collect();
            origin.sort_unstable();
            origin.dedup();
            let mut graph = MultiGraph::new(origin.len());
            let mut ids = rustc_hash::FxHashMap::default();
            let mut labels = Vec::new();
            for &(id, u, v) in edges {
                let lu = origin.binary_search(&u).unwrap();
                let lv = origin.binary_search(&v).unwrap();
                let e = graph.add_edge(lu, lv)?;
                if ids.insert(id, e).is_some() {
                    return Err(invalid(format!("edge id {id} repeated in block {i}")));
                }
                labels.push(if vedges.contains(&id) {
                    EdgeLabel::Virtual(usize::MAX)
                } else if id < num_edges {
                    EdgeLabel::Real(id)
                } else {
                    return Err(invalid(format!("real edge id {id} out of range")));
                });
            }
            blocks.push(TreeBlock {
                kind: *kind,
                graph,
                vertex_origin: origin,
                labels,
            });
            local_of_edge.push(ids);
        }
        let mut links = Vec::new();
        for (l, f) in raw_links.iter().enumerate() {
            let [a, b, ga, ta, ha, gb, tb, hb] = *f;
            if a >= blocks.len() || b >= blocks.len() {
                return Err(invalid(format!("link {l} names a missing block")));
            }
            let fa = *local_of_edge[a].get(&ga).ok_or_else(|| invalid(format!("link {l}: no edge {ga}")))?;
            let fb = *local_of_edge[b].get(&gb).ok_or_else(|| invalid(format!("link {l}: no edge {gb}")))?;
            let loc = |blk: &TreeBlock, v: VertexId| {
                blk.vertex_origin
                    .binary_search(&v)
                    .map_err(|_| invalid(format!("link {l}: vertex {v} not in block")))
            };
            let link = TreeLink {
                a,
                b,
                fa,
                fa_tail: loc(&blocks[a], ta)?,
                fa_head: loc(&blocks[a], ha)?,
                fb,
                fb_tail: loc(&blocks[b], tb)?,
                fb_head: loc(&blocks[b], hb)?,
            };
            for (blk, e) in [(a, fa), (b, fb)] {
                if blocks[blk].labels[e] != EdgeLabel::Virtual(usize::MAX) {
                    return Err(invalid(format!("link {l} uses an unflagged or shared edge")));
                }
                blocks[blk].labels[e] = EdgeLabel::Virtual(l);
            }
            links.push(link);
        }
        let tree = ThreeBlockTree {
            num_vertices,
            num_edges,
            blocks,
            links,
        };
        tree.validate()?;
        Ok(tree)
    }
}

/// Γ(T): amalgamates every link, returning the graph with vertices ordered
/// by their smallest (block, local vertex) key and edges by real id.
pub fn reconstruct(tree: &ThreeBlockTree) -> Result<MultiGraph> {
    let order: Vec<usize> = (0..tree.links.len()).collect();
    let piece = fold_links(tree, None, &order)?;
    Ok(canonicalize(&piece)?.0)
}

/// Reconstructs along `trials` random link orders and reports whether all
/// results coincide with the canonical one.
pub fn order_invariance_check(tree: &ThreeBlockTree, trials: usize, seed: u64) -> Result<bool> {
    let reference = reconstruct(tree)?;
    let mut rng = rng_for(seed, "link-order", 0);
    let mut order: Vec<usize> = (0..tree.links.len()).collect();
    for _ in 0..trials {
        order.shuffle(&mut rng);
        let piece = fold_links(tree, None, &order)?;
        if canonicalize(&piece)?.0 != reference {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `g` and `h` are isomorphic by a vertex bijection that fixes
/// every edge id.
pub fn isomorphic_with_edge_ids(g: &MultiGraph, h: &MultiGraph) -> bool {
    if g.num_vertices() != h.num_vertices() || g.num_edges() != h.num_edges() {
        return false;
    }
    let signature = |x: &MultiGraph| {
        let mut sets: Vec<Vec<EdgeId>> = (0..x.num_vertices())
            .map(|v| {
                let mut s: Vec<EdgeId> = x.darts_at(v).iter().map(|d| d / 2).collect();
                s.sort_unstable();
                s
            })
            .collect();
        sets.sort();
        sets
    };
    signature(g) == signature(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn two_triangles() -> MultiGraph {
        // triangles 0-1-2 and 1-3-2 sharing edge 1-2
        MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (1, 3), (3, 2)]).unwrap()
    }

    #[test]
    fn amalgam_of_triangles_is_square() {
        let t = generators::cycle(3);
        let spec = AmalgamSpec {
            fa: 0,
            fa_tail: 0,
            fa_head: 1,
            fb: 0,
            fb_tail: 0,
            fb_head: 1,
        };
        let am = edge_amalgam(&t, &t, &spec).unwrap();
        assert_eq!(am.graph.num_vertices(), 4);
        assert_eq!(am.graph.num_edges(), 4);
        assert!((0..4).all(|v| am.graph.degree(v) == 2));
        assert!(am.graph.is_connected());
        assert_eq!(am.a_edge[0], None);
    }

    #[test]
    fn amalgam_of_multilinks() {
        let m3 = MultiGraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let spec = AmalgamSpec {
            fa: 1,
            fa_tail: 0,
            fa_head: 1,
            fb: 2,
            fb_tail: 1,
            fb_head: 0,
        };
        let am = edge_amalgam(&m3, &m3, &spec).unwrap();
        assert_eq!(am.graph.num_vertices(), 2);
        assert_eq!(am.graph.num_edges(), 4);
    }

    #[test]
    fn invalid_amalgam_spec() {
        let t = generators::cycle(3);
        let spec = AmalgamSpec {
            fa: 0,
            fa_tail: 0,
            fa_head: 2,
            fb: 0,
            fb_tail: 0,
            fb_head: 1,
        };
        assert!(matches!(edge_amalgam(&t, &t, &spec), Err(Error::InvalidAmalgam(_))));
    }

    #[test]
    fn two_triangles_tree() {
        let g = two_triangles();
        let t = decompose_3blocks(&g).unwrap();
        t.validate().unwrap();
        let kinds: Vec<BlockKind> = t.blocks.iter().map(|b| b.kind).collect();
        assert_eq!(kinds, vec![BlockKind::Cycle, BlockKind::Cycle, BlockKind::Multilink]);
        let ml = &t.blocks[2];
        assert_eq!(ml.real_edges(), vec![1]);
        assert_eq!(ml.num_virtual(), 2);
        assert_eq!(t.neighbors(2).len(), 2);
        let back = reconstruct(&t).unwrap();
        assert!(isomorphic_with_edge_ids(&back, &g));
    }

    #[test]
    fn single_block_trees() {
        let k4 = decompose_3blocks(&generators::complete(4)).unwrap();
        assert_eq!(k4.num_blocks(), 1);
        assert_eq!(k4.blocks[0].kind, BlockKind::ThreeConnected);
        assert_eq!(k4.blocks[0].num_virtual(), 0);
        let c6 = decompose_3blocks(&generators::cycle(6)).unwrap();
        assert_eq!(c6.num_blocks(), 1);
        assert_eq!(c6.blocks[0].kind, BlockKind::Cycle);
        assert_eq!(reconstruct(&c6).unwrap(), generators::cycle(6));
        let bond = MultiGraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let b = decompose_3blocks(&bond).unwrap();
        assert_eq!(b.blocks[0].kind, BlockKind::Multilink);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            decompose_3blocks(&generators::path(4)),
            Err(Error::NotKConnected(2))
        ));
        let digon = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        assert!(matches!(decompose_3blocks(&digon), Err(Error::TooFewEdges(2))));
    }

    #[test]
    fn chorded_pentagon() {
        let mut g = generators::cycle(5);
        g.add_edge(0, 2).unwrap();
        let t = decompose_3blocks(&g).unwrap();
        assert_eq!(t.num_blocks(), 3);
        assert_eq!(t.count_kind(BlockKind::Multilink), 1);
        assert_eq!(t.count_kind(BlockKind::Cycle), 2);
    }

    #[test]
    fn adjacent_polygons_are_merged() {
        // two squares glued along a path of length 2 give a 6-cycle with a
        // 2-path chord; the chord path and both sides are polygons around
        // one bond of three virtual edges
        let g = MultiGraph::from_edges(
            6,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)],
        )
        .unwrap();
        let t = decompose_3blocks(&g).unwrap();
        t.validate().unwrap();
        assert_eq!(t.count_kind(BlockKind::Cycle), 2);
        assert_eq!(t.count_kind(BlockKind::Multilink), 1);
        assert!(isomorphic_with_edge_ids(&reconstruct(&t).unwrap(), &g));

        // a long cycle split into polygons must come back as one cycle
        let c8 = generators::cycle(8);
        assert_eq!(decompose_3blocks(&c8).unwrap().num_blocks(), 1);
    }

    #[test]
    fn parallel_edges_in_triangle() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0), (0, 1), (0, 1)]).unwrap();
        let t = decompose_3blocks(&g).unwrap();
        t.validate().unwrap();
        assert_eq!(t.num_blocks(), 2);
        assert_eq!(t.blocks[1].kind, BlockKind::Multilink);
        assert_eq!(t.blocks[1].real_edges(), vec![0, 3, 4]);
    }

    #[test]
    fn separation_pair_search_agrees_with_brute_force() {
        for seed in 0..40 {
            let g = generators::random_biconnected_planar(8, (seed % 7) as usize, (seed % 3) as usize, seed);
            let fast = find_separation_pair(&g).is_some();
            let slow = find_separation_pair_brute(&g).is_some();
            assert_eq!(fast, slow, "seed {seed}");
        }
        assert!(find_separation_pair(&generators::complete(4)).is_none());
        assert!(find_separation_pair(&generators::prism()).is_none());
    }

    #[test]
    fn text_round_trip() {
        let g = two_triangles();
        let t = decompose_3blocks(&g).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("blocktree 4 5\nblock 0 cycle\n"));
        assert!(text.contains("vedge 2 "));
        let back = ThreeBlockTree::parse(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn parse_rejects_adjacent_cycles() {
        let text = "blocktree 4 4\nblock 0 cycle\ne 0 0 1\ne 1 1 2\ne 4 0 2\nvedge 0 4\n\
                    block 1 cycle\ne 2 2 3\ne 3 3 0\ne 5 0 2\nvedge 1 5\ntlink 0 1 4 0 2 5 0 2\n";
        assert!(matches!(ThreeBlockTree::parse(text), Err(Error::InvalidBlockTree(_))));
    }

    #[test]
    fn order_invariance() {
        let g = two_triangles();
        let t = decompose_3blocks(&g).unwrap();
        assert!(order_invariance_check(&t, 10, 1).unwrap());
        // star: a bond with four polygons hanging off it
        let star = MultiGraph::from_edges(
            6,
            &[(0, 1), (0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1), (0, 5), (5, 1)],
        )
        .unwrap();
        let t = decompose_3blocks(&star).unwrap();
        assert_eq!(t.num_blocks(), 5);
        assert!(order_invariance_check(&t, 20, 2).unwrap());
    }
}
