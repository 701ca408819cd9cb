//! Minimal end-cuts near a vertex under the escape rule.
//!
//! A component counts as infinite when it reaches G-distance `h_esc` from the
//! centre. Edges outside the inner ball `B_H(x, R)` cannot be cut, so the
//! alive graph on `B_G(x, h_esc)` is contracted along them; minimal end-cuts
//! are then the bonds of the contracted graph whose two sides both escape.

use crate::error::Result;
use crate::multigraph::{EdgeId, MultiGraph, VertexId};

use super::oracle::View;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSet {
    /// Sorted edge ids.
    pub edges: Vec<EdgeId>,
    pub center: VertexId,
    pub radius: usize,
}

/// Escape radius for stage `r`: the largest `h <= max(4r, 16)` whose ball
/// has at most `budget` vertices, but never below `r + 2`. `sizes[h]` is
/// `|B(o, h)|`.
pub fn escape_radius(sizes: &[usize], r: usize, budget: usize) -> usize {
    let ceiling = (4 * r).max(16);
    let mut h = 0;
    for (i, &s) in sizes.iter().enumerate().take(ceiling + 1) {
        if s > budget {
            break;
        }
        h = i;
    }
    h.max(r + 2)
}

/// Reusable end-cut enumerator; scratch space is sized to the host graph.
pub struct EndCutFinder {
    radius: usize,
    f_max: usize,
    h_esc: usize,
    epoch: u32,
    seen: Vec<u32>,
    inner: Vec<u32>,
    dist: Vec<u32>,
    local: Vec<u32>,
}

struct Contracted {
    adj: Vec<Vec<(usize, EdgeId)>>,
    escapes: Vec<bool>,
    root: usize,
}

impl EndCutFinder {
    pub fn new(num_vertices: usize, radius: usize, f_max: usize, h_esc: usize) -> Self {
        EndCutFinder {
            radius,
            f_max,
            h_esc,
            epoch: 0,
            seen: vec![0; num_vertices],
            inner: vec![0; num_vertices],
            dist: vec![0; num_vertices],
            local: vec![0; num_vertices],
        }
    }

    pub fn h_esc(&self) -> usize {
        self.h_esc
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.seen.fill(0);
            self.inner.fill(0);
            self.epoch = 1;
        }
        self.epoch
    }

    fn contract(&mut self, g: &MultiGraph, alive: &[bool], x: VertexId) -> Option<Contracted> {
        let ep = self.next_epoch();
        let h = self.h_esc as u32;
        let mut ball = vec![x];
        self.seen[x] = ep;
        self.dist[x] = 0;
        self.local[x] = 0;
        let mut i = 0;
        while i < ball.len() {
            let u = ball[i];
            i += 1;
            if self.dist[u] == h {
                continue;
            }
            for (_, y) in g.neighbors(u) {
                if self.seen[y] != ep {
                    self.seen[y] = ep;
                    self.dist[y] = self.dist[u] + 1;
                    self.local[y] = ball.len() as u32;
                    ball.push(y);
                }
            }
        }

        // inner ball in the current graph
        let mut layer = vec![x];
        self.inner[x] = ep;
        for _ in 0..self.radius {
            let mut next = Vec::new();
            for &u in &layer {
                for (e, y) in g.neighbors(u) {
                    if alive[e] && self.inner[y] != ep {
                        self.inner[y] = ep;
                        next.push(y);
                    }
                }
            }
            layer = next;
        }

        let mut parent: Vec<u32> = (0..ball.len() as u32).collect();
        fn find(parent: &mut [u32], mut a: u32) -> u32 {
            while parent[a as usize] != a {
                parent[a as usize] = parent[parent[a as usize] as usize];
                a = parent[a as usize];
            }
            a
        }
        let mut inner_edges = Vec::new();
        for (i, &u) in ball.iter().enumerate() {
            for (e, y) in g.neighbors(u) {
                if !alive[e] || self.seen[y] != ep {
                    continue;
                }
                let j = self.local[y] as usize;
                if i >= j {
                    continue;
                }
                if self.inner[u] == ep && self.inner[y] == ep {
                    inner_edges.push((e, i as u32, j as u32));
                } else {
                    let (a, b) = (find(&mut parent, i as u32), find(&mut parent, j as u32));
                    if a != b {
                        parent[a as usize] = b;
                    }
                }
            }
        }

        let mut node_of = vec![u32::MAX; ball.len()];
        let mut count = 0usize;
        let mut escapes = Vec::new();
        for i in 0..ball.len() {
            let root = find(&mut parent, i as u32) as usize;
            if node_of[root] == u32::MAX {
                node_of[root] = count as u32;
                count += 1;
                escapes.push(false);
            }
            node_of[i] = node_of[root];
            if self.dist[ball[i]] == h {
                escapes[node_of[i] as usize] = true;
            }
        }
        let mut adj = vec![Vec::new(); count];
        for &(e, i, j) in &inner_edges {
            let (a, b) = (node_of[i as usize] as usize, node_of[j as usize] as usize);
            if a != b {
                adj[a].push((b, e));
                adj[b].push((a, e));
            }
        }

        // restrict to the component of x
        let start = node_of[0] as usize;
        let mut renum = vec![usize::MAX; count];
        let mut order = vec![start];
        renum[start] = 0;
        let mut k = 0;
        while k < order.len() {
            let a = order[k];
            k += 1;
            for &(b, _) in &adj[a] {
                if renum[b] == usize::MAX {
                    renum[b] = order.len();
                    order.push(b);
                }
            }
        }
        let comp_escapes: Vec<bool> = order.iter().map(|&a| escapes[a]).collect();
        if comp_escapes.iter().filter(|&&b| b).count() < 2 {
            return None;
        }
        let comp_adj = order
            .iter()
            .map(|&a| adj[a].iter().map(|&(b, e)| (renum[b], e)).collect())
            .collect();
        Some(Contracted {
            adj: comp_adj,
            escapes: comp_escapes,
            root: 0,
        })
    }

    /// Minimal end-cuts of the alive subgraph contained in `B_H(x, R)`, at
    /// most `f_max` edges each, sorted by size then edge ids. The caller
    /// guarantees that `B_G(x, h_esc)` is complete in `g`.
    pub fn find(&mut self, g: &MultiGraph, alive: &[bool], x: VertexId) -> Vec<CutSet> {
        let Some(q) = self.contract(g, alive, x) else {
            return Vec::new();
        };
        let mut side = vec![0u8; q.adj.len()];
        side[q.root] = IN;
        let mut found = Vec::new();
        bonds(&q, &mut side, 0, self.f_max, &mut found);
        let mut cuts: Vec<CutSet> = found
            .into_iter()
            .map(|edges| CutSet {
                edges,
                center: x,
                radius: self.radius,
            })
            .collect();
        cuts.sort_by(|a, b| a.edges.len().cmp(&b.edges.len()).then_with(|| a.edges.cmp(&b.edges)));
        cuts
    }
}

const IN: u8 = 1;
const OUT: u8 = 2;

/// Enumerates connected sets containing the root by branching on the
/// smallest frontier node; `cut` counts edges from the set to excluded nodes.
fn bonds(q: &Contracted, side: &mut [u8], cut: usize, f_max: usize, found: &mut Vec<Vec<EdgeId>>) {
    let frontier =
        (0..side.len()).find(|&v| side[v] == 0 && q.adj[v].iter().any(|&(w, _)| side[w] == IN));
    let Some(v) = frontier else {
        leaf(q, side, found);
        return;
    };
    let to_out = q.adj[v].iter().filter(|&&(w, _)| side[w] == OUT).count();
    let to_in = q.adj[v].iter().filter(|&&(w, _)| side[w] == IN).count();
    side[v] = IN;
    if cut + to_out <= f_max {
        bonds(q, side, cut + to_out, f_max, found);
    }
    side[v] = OUT;
    if cut + to_in <= f_max {
        bonds(q, side, cut + to_in, f_max, found);
    }
    side[v] = 0;
}

fn leaf(q: &Contracted, side: &[u8], found: &mut Vec<Vec<EdgeId>>) {
    let n = side.len();
    let rest: Vec<usize> = (0..n).filter(|&v| side[v] != IN).collect();
    if rest.is_empty() {
        return;
    }
    let inside_escapes = (0..n).any(|v| side[v] == IN && q.escapes[v]);
    let outside_escapes = rest.iter().any(|&v| q.escapes[v]);
    if !inside_escapes || !outside_escapes {
        return;
    }
    let mut reached = vec![false; n];
    reached[rest[0]] = true;
    let mut stack = vec![rest[0]];
    let mut count = 1;
    while let Some(a) = stack.pop() {
        for &(b, _) in &q.adj[a] {
            if side[b] != IN && !reached[b] {
                reached[b] = true;
                count += 1;
                stack.push(b);
            }
        }
    }
    if count != rest.len() {
        return;
    }
    let mut edges: Vec<EdgeId> = (0..n)
        .filter(|&v| side[v] == IN)
        .flat_map(|v| q.adj[v].iter().filter(|&&(w, _)| side[w] != IN).map(|&(_, e)| e))
        .collect();
    edges.sort_unstable();
    found.push(edges);
}

/// Minimal end-cuts at `x` in a view, after checking the horizon.
pub fn enumerate_min_endcuts(
    view: &View,
    alive: &[bool],
    x: VertexId,
    radius: usize,
    f_max: usize,
    h_esc: usize,
) -> Result<Vec<CutSet>> {
    view.require(x, h_esc)?;
    Ok(EndCutFinder::new(view.num_vertices(), radius, f_max, h_esc).find(&view.graph, alive, x))
}
