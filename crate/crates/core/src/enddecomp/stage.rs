//! The staged removal process on a finite view of an oracle.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::multigraph::{EdgeId, VertexId};
use crate::seed::{derive_seed, hash_label, rng_for};

use super::decomposing::is_forest;
use super::endcuts::{escape_radius, CutSet, EndCutFinder};
use super::oracle::{ball_sizes, View};

#[derive(Clone, Debug)]
pub struct DecomposeConfig {
    pub r_max: usize,
    pub f_max: usize,
    /// Largest ball explored when certifying escape.
    pub escape_budget: usize,
    /// Fixed escape radius for every stage, overriding the budget rule.
    pub h_esc: Option<usize>,
    /// Roots sampled when estimating `M_R`.
    pub schedule_roots: usize,
    pub schedule_seed: u64,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            r_max: 3,
            f_max: 6,
            escape_budget: 2000,
            h_esc: None,
            schedule_roots: 500,
            schedule_seed: 0,
        }
    }
}

/// Step counts for stage `r`. `M_R = 2^log2_m` is kept as a float because it
/// is astronomically large whenever balls are.
#[derive(Clone, Debug, PartialEq)]
pub struct StageSchedule {
    pub r: usize,
    pub log2_m: u32,
    pub m_r: f64,
    pub c_r: f64,
    pub reshuffles: u64,
    pub k_r: f64,
    pub n_r: f64,
}

impl StageSchedule {
    /// Picks the smallest `log2 M_R` such that more than a `1 - 2^-r`
    /// fraction of the sampled `|B(v, 2r)|` lie below it.
    pub fn from_ball_sizes(r: usize, sizes: &[usize], previous_n: f64) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Empty("ball size sample"));
        }
        let target = 1.0 - 0.5f64.powi(r as i32);
        let mut sorted = sizes.to_vec();
        sorted.sort_unstable();
        let n = sorted.len() as f64;
        let fraction_below = |m: usize| sorted.partition_point(|&s| s < m) as f64 / n;
        let log2_m = std::iter::once(1)
            .chain(sorted.iter().map(|&s| s + 1))
            .find(|&m| fraction_below(m) > target)
            .expect("the largest size plus one always qualifies");
        let m_r = 2f64.powi(log2_m as i32);
        let c_r = 1.0 / log2_m as f64;
        let reshuffles = if c_r >= 1.0 {
            1
        } else {
            ((-(r as f64)) / (1.0 - c_r).log2()).ceil().max(1.0) as u64
        };
        let k_r = m_r * reshuffles as f64;
        Ok(StageSchedule {
            r,
            log2_m: log2_m as u32,
            m_r,
            c_r,
            reshuffles,
            k_r,
            n_r: previous_n + k_r,
        })
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionState {
    pub alive: Vec<bool>,
    /// Removed edges in removal order.
    pub removed: Vec<EdgeId>,
    pub steps: u64,
}

#[derive(Clone, Debug)]
pub struct StageReport {
    pub schedule: StageSchedule,
    pub h_esc: usize,
    pub rounds: u64,
    pub steps: u64,
    pub removed: usize,
    /// The stage ended because no active vertex had an end-cut left.
    pub exhausted: bool,
    pub forest: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentClass {
    Finite,
    OneEscape,
    MultiEscape,
}

impl ComponentClass {
    pub fn name(self) -> &'static str {
        match self {
            ComponentClass::Finite => "finite",
            ComponentClass::OneEscape => "one-escape",
            ComponentClass::MultiEscape => "multi-escape",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComponentReport {
    /// Smallest view vertex of the component.
    pub representative: VertexId,
    pub size: usize,
    /// Pieces outside the active ball that reach the view boundary.
    pub escapes: usize,
    pub class: ComponentClass,
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub oracle: String,
    pub seed: u64,
    pub stages: Vec<StageReport>,
    pub removed: Vec<EdgeId>,
    pub components: Vec<ComponentReport>,
    /// Factor graph on window components, as pairs of representatives.
    pub factor_edges: Vec<(VertexId, VertexId)>,
    pub forest: bool,
    /// Minimal end-cuts left in `B(o, r_max)`.
    pub origin_cuts: usize,
}

impl DecompositionReport {
    pub fn count(&self, class: ComponentClass) -> usize {
        self.components.iter().filter(|c| c.class == class).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "decompose {} seed={}", self.oracle, self.seed).unwrap();
        for s in &self.stages {
            writeln!(
                out,
                "stage R={} log2_M={} reshuffles={} h_esc={} rounds={} steps={} removed={} exhausted={} forest={}",
                s.schedule.r,
                s.schedule.log2_m,
                s.schedule.reshuffles,
                s.h_esc,
                s.rounds,
                s.steps,
                s.removed,
                s.exhausted,
                s.forest
            )
            .unwrap();
        }
        for c in &self.components {
            writeln!(
                out,
                "component {} size={} escapes={} class={}",
                c.representative,
                c.size,
                c.escapes,
                c.class.name()
            )
            .unwrap();
        }
        for &(a, b) in &self.factor_edges {
            writeln!(out, "factor {a} {b}").unwrap();
        }
        writeln!(
            out,
            "summary removed={} finite={} one-escape={} multi-escape={} forest={} origin_cuts={}",
            self.removed.len(),
            self.count(ComponentClass::Finite),
            self.count(ComponentClass::OneEscape),
            self.count(ComponentClass::MultiEscape),
            self.forest,
            self.origin_cuts
        )
        .unwrap();
        out
    }
}

struct StagePlan {
    schedule: StageSchedule,
    h_esc: usize,
    /// `B_G(x, 2r) \ {x}` for each active vertex.
    balls: Vec<Vec<VertexId>>,
}

/// A materialised view plus everything that does not depend on the run seed.
/// Vertices within `2 r_max` of the origin act; the rest of the view only
/// certifies escape.
pub struct Decomposer {
    pub view: View,
    pub config: DecomposeConfig,
    pub active_radius: usize,
    active: Vec<VertexId>,
    active_index: Vec<usize>,
    plans: Vec<StagePlan>,
}

struct Scratch {
    stamp: Vec<u32>,
    epoch: u32,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { stamp: vec![0; n], epoch: 0 }
    }

    fn ball(&mut self, view: &View, x: VertexId, r: usize) -> Vec<VertexId> {
        self.epoch += 1;
        let ep = self.epoch;
        self.stamp[x] = ep;
        let mut out = vec![x];
        let mut layer_start = 0;
        for _ in 0..r {
            let layer_end = out.len();
            for i in layer_start..layer_end {
                for (_, y) in view.graph.neighbors(out[i]) {
                    if self.stamp[y] != ep {
                        self.stamp[y] = ep;
                        out.push(y);
                    }
                }
            }
            layer_start = layer_end;
        }
        out
    }
}

impl Decomposer {
    pub fn new(name: &str, config: DecomposeConfig) -> Result<Self> {
        if config.r_max == 0 {
            return Err(Error::Empty("stage list"));
        }
        let ceiling = (4 * config.r_max).max(16);
        let sizes = ball_sizes(name, ceiling, config.escape_budget)?;
        let h_esc: Vec<usize> = (1..=config.r_max)
            .map(|r| config.h_esc.unwrap_or_else(|| escape_radius(&sizes, r, config.escape_budget)))
            .collect();
        let active_radius = 2 * config.r_max;
        let reach = h_esc.iter().copied().max().unwrap().max(2 * config.r_max);
        let view = View::named(name, active_radius + reach)?;
        let active = view.ball_vertices(active_radius);
        let mut active_index = vec![usize::MAX; view.num_vertices()];
        for (i, &v) in active.iter().enumerate() {
            active_index[v] = i;
        }
        let mut scratch = Scratch::new(view.num_vertices());
        let mut plans = Vec::new();
        let mut n_r = 0.0;
        for r in 1..=config.r_max {
            let balls: Vec<Vec<VertexId>> = active
                .iter()
                .map(|&x| {
                    let mut b = scratch.ball(&view, x, 2 * r);
                    b.remove(0);
                    b
                })
                .collect();
            let mut rng = rng_for(config.schedule_seed, "schedule", r as u64);
            let sample: Vec<usize> = (0..config.schedule_roots.max(1))
                .map(|_| balls[rng.gen_range(0..active.len())].len() + 1)
                .collect();
            let schedule = StageSchedule::from_ball_sizes(r, &sample, n_r)?;
            n_r = schedule.n_r;
            plans.push(StagePlan {
                schedule,
                h_esc: h_esc[r - 1],
                balls,
            });
        }
        Ok(Decomposer {
            view,
            config,
            active_radius,
            active,
            active_index,
            plans,
        })
    }

    pub fn schedule(&self, r: usize) -> &StageSchedule {
        &self.plans[r - 1].schedule
    }

    pub fn h_esc(&self, r: usize) -> usize {
        self.plans[r - 1].h_esc
    }

    pub fn active(&self) -> &[VertexId] {
        &self.active
    }

    pub fn initial_state(&self) -> DecompositionState {
        DecompositionState {
            alive: vec![true; self.view.graph.num_edges()],
            removed: Vec::new(),
            steps: 0,
        }
    }

    /// Active vertices of `I_R` for the given label seed, ranked by
    /// `(label, key)` against their `2r`-balls.
    pub fn sample_i_r(&self, r: usize, label_seed: u64) -> Vec<VertexId> {
        let plan = &self.plans[r - 1];
        let keys = &self.view.keys;
        let rank = |v: VertexId| (hash_label(label_seed, &keys[v]), keys[v]);
        self.active
            .iter()
            .enumerate()
            .filter(|&(i, &x)| {
                let rx = rank(x);
                plan.balls[i].iter().all(|&y| rank(y) < rx)
            })
            .map(|(_, &x)| x)
            .collect()
    }

    /// Runs stage `r` on `state`: `reshuffles` rounds, each sampling a fresh
    /// `I_R` and removing one uniform minimal end-cut per member per step.
    pub fn run_stage(&self, state: &mut DecompositionState, r: usize, seed: u64) -> Result<StageReport> {
        if r == 0 || r > self.plans.len() {
            return Err(Error::HorizonExhausted(format!(
                "stage {r} outside the prepared range 1..={}",
                self.plans.len()
            )));
        }
        let plan = &self.plans[r - 1];
        let g = &self.view.graph;
        let mut finder = EndCutFinder::new(g.num_vertices(), r, self.config.f_max, plan.h_esc);
        let mut cache: Vec<Option<Vec<CutSet>>> = vec![None; self.active.len()];
        let mut scratch = Scratch::new(g.num_vertices());
        let mut report = StageReport {
            schedule: plan.schedule.clone(),
            h_esc: plan.h_esc,
            rounds: 0,
            steps: 0,
            removed: 0,
            exhausted: false,
            forest: true,
        };

        for round in 0..plan.schedule.reshuffles {
            report.rounds += 1;
            let id = ((r as u64) << 32) | round;
            let members = self.sample_i_r(r, derive_seed(seed, "labels", id));
            let mut rng = rng_for(seed, "steps", id);
            let mut step = 0u64;
            let mut removed_in_round = 0;
            while (step as f64) < plan.schedule.m_r {
                let mut picks: Vec<Vec<EdgeId>> = Vec::new();
                for &x in &members {
                    let cuts = self.cuts(&mut cache, &mut finder, &state.alive, x);
                    if !cuts.is_empty() {
                        picks.push(cuts[rng.gen_range(0..cuts.len())].edges.clone());
                    }
                }
                if picks.is_empty() {
                    break;
                }
                let mut all: Vec<EdgeId> = picks.concat();
                let total = all.len();
                all.sort_unstable();
                all.dedup();
                assert_eq!(all.len(), total, "cuts chosen for distinct I_R members overlap");
                for &e in &all {
                    state.alive[e] = false;
                    state.removed.push(e);
                    let (u, v) = g.endpoints(e);
                    for end in [u, v] {
                        for w in scratch.ball(&self.view, end, plan.h_esc) {
                            if self.active_index[w] != usize::MAX {
                                cache[self.active_index[w]] = None;
                            }
                        }
                    }
                }
                removed_in_round += all.len();
                step += 1;
                state.steps += 1;
                report.steps += 1;
            }
            report.removed += removed_in_round;
            if removed_in_round == 0 {
                let any = (0..self.active.len()).any(|i| {
                    !self.cuts(&mut cache, &mut finder, &state.alive, self.active[i]).is_empty()
                });
                if !any {
                    report.exhausted = true;
                    break;
                }
            }
        }
        report.forest = self.window_forest(&state.alive, &state.removed);
        Ok(report)
    }

    fn cuts<'c>(
        &self,
        cache: &'c mut [Option<Vec<CutSet>>],
        finder: &mut EndCutFinder,
        alive: &[bool],
        x: VertexId,
    ) -> &'c [CutSet] {
        let i = self.active_index[x];
        cache[i].get_or_insert_with(|| finder.find(&self.view.graph, alive, x))
    }

    fn window_radius(&self) -> usize {
        self.active_radius + self.config.r_max
    }

    /// Factor graph of the view by the alive subgraph, restricted to removed
    /// edges inside the window `B(o, active + r_max)`; components are taken
    /// in the whole view.
    fn factor_pairs(&self, alive: &[bool], removed: &[EdgeId]) -> (Vec<usize>, usize, Vec<(usize, usize)>) {
        let g = &self.view.graph;
        let (comp, count) = g.components_filtered(|e| alive[e]);
        let w = self.window_radius();
        let pairs = removed
            .iter()
            .map(|&e| g.endpoints(e))
            .filter(|&(u, v)| self.view.depth[u] <= w && self.view.depth[v] <= w)
            .map(|(u, v)| (comp[u], comp[v]))
            .filter(|(a, b)| a != b)
            .collect();
        (comp, count, pairs)
    }

    fn window_forest(&self, alive: &[bool], removed: &[EdgeId]) -> bool {
        let (_, count, pairs) = self.factor_pairs(alive, removed);
        is_forest(count, pairs.into_iter())
    }

    /// Minimal end-cuts at the origin within radius `r` of the current graph.
    pub fn origin_cuts(&self, alive: &[bool], r: usize) -> Vec<CutSet> {
        let h = self.plans[r - 1].h_esc;
        EndCutFinder::new(self.view.num_vertices(), r, self.config.f_max, h).find(
            &self.view.graph,
            alive,
            self.view.origin(),
        )
    }

    /// Runs stages `1..=r_max`, returning the final state.
    pub fn run_state(&self, seed: u64) -> Result<(DecompositionState, Vec<StageReport>)> {
        let mut state = self.initial_state();
        let mut stages = Vec::new();
        for r in 1..=self.config.r_max {
            stages.push(self.run_stage(&mut state, r, seed)?);
        }
        Ok((state, stages))
    }

    /// Runs stages `1..=r_max` and reports on the result.
    pub fn run(&self, seed: u64) -> Result<DecompositionReport> {
        let (state, stages) = self.run_state(seed)?;
        Ok(self.report(&state, stages, seed))
    }

    /// Vertices of the window `B(o, 2 r_max + r_max)` used for the factor graph.
    pub fn window(&self) -> Vec<VertexId> {
        self.view.ball_vertices(self.window_radius())
    }

    pub fn report(&self, state: &DecompositionState, stages: Vec<StageReport>, seed: u64) -> DecompositionReport {
        let g = &self.view.graph;
        let depth = &self.view.depth;
        let (comp, count, pairs) = self.factor_pairs(&state.alive, &state.removed);
        let mut representative = vec![usize::MAX; count];
        let mut size = vec![0usize; count];
        for v in 0..g.num_vertices() {
            representative[comp[v]] = representative[comp[v]].min(v);
            size[comp[v]] += 1;
        }

        // pieces of each component beyond the active ball reaching the boundary
        let a = self.active_radius;
        let (outer, _) = g.components_filtered(|e| {
            let (u, v) = g.endpoints(e);
            state.alive[e] && depth[u] > a && depth[v] > a
        });
        let mut pieces: Vec<Vec<usize>> = vec![Vec::new(); count];
        for v in 0..g.num_vertices() {
            if depth[v] == self.view.radius {
                pieces[comp[v]].push(outer[v]);
            }
        }
        let mut reported: Vec<usize> = (0..g.num_vertices())
            .filter(|&v| depth[v] <= self.config.r_max)
            .map(|v| comp[v])
            .collect();
        reported.sort_unstable();
        reported.dedup();
        let components = reported
            .into_iter()
            .map(|c| {
                let p = &mut pieces[c];
                p.sort_unstable();
                p.dedup();
                let class = match p.len() {
                    0 => ComponentClass::Finite,
                    1 => ComponentClass::OneEscape,
                    _ => ComponentClass::MultiEscape,
                };
                ComponentReport {
                    representative: representative[c],
                    size: size[c],
                    escapes: p.len(),
                    class,
                }
            })
            .collect();

        let forest = is_forest(count, pairs.iter().copied());
        let mut factor_edges: Vec<(VertexId, VertexId)> = pairs
            .into_iter()
            .map(|(x, y)| {
                let (p, q) = (representative[x], representative[y]);
                (p.min(q), p.max(q))
            })
            .collect();
        factor_edges.sort_unstable();
        factor_edges.dedup();

        let mut removed = state.removed.clone();
        removed.sort_unstable();
        DecompositionReport {
            oracle: self.view.name.clone(),
            seed,
            stages,
            removed,
            components,
            factor_edges,
            forest,
            origin_cuts: self.origin_cuts(&state.alive, self.config.r_max).len(),
        }
    }
}

/// One full run on the named oracle with default settings apart from the
/// stage count and cut size cap.
pub fn decompose(name: &str, r_max: usize, seed: u64, f_max: usize) -> Result<DecompositionReport> {
    let config = DecomposeConfig {
        r_max,
        f_max,
        ..DecomposeConfig::default()
    };
    Decomposer::new(name, config)?.run(seed)
}
