//! The two-player greedy all-switches strategy improvement loop: switchable
//! set computation for the improver (always player Even), the outer iteration,
//! and winning set extraction.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::best_response::{
    best_response_bellman_ford_observed, best_response_si_observed, ValuationObserver,
};
use crate::euler_rank::{compute_valuation_parallel, compute_valuation_seq};
use crate::game::{AugmentedGame, Owner, Vertex, NO_VERTEX};
use crate::valuation::ValuationTable;

/// How best responses are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrMethod {
    /// One-player strategy improvement, warm-started with the best response
    /// to the previous improver strategy.
    Si,
    /// One-player strategy improvement, reset to the initial opponent
    /// strategy before every best response computation.
    SiReset,
    /// Bellman-Ford value iteration.
    BellmanFord,
}

impl BrMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BrMethod::Si => "si",
            BrMethod::SiReset => "si-reset",
            BrMethod::BellmanFord => "bellman-ford",
        }
    }
}

/// How valuations of a strategy pair are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValBackend {
    /// Sequential backwards walk over the strategy tree.
    Seq,
    /// Euler tour plus parallel list ranking; falls back to the sequential
    /// walk below the work-efficiency threshold unless forced.
    ListRank,
}

impl ValBackend {
    pub fn as_str(self) -> &'static str {
        match self {
            ValBackend::Seq => "seq",
            ValBackend::ListRank => "listrank",
        }
    }
}

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub br_method: BrMethod,
    pub val_backend: ValBackend,
    pub threads: usize,
    pub seed: u64,
    /// Run the list-ranking pipeline even below its profitability threshold.
    /// Useful for testing and micro-benchmarking; not exposed on the CLI.
    pub force_listrank: bool,
    /// Check the strict improvement property between major iterations and the
    /// monotone descent of the inner loop; violations abort the solve.
    pub validate: bool,
    /// Record the improver strategy after every major iteration.
    pub record_trace: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            br_method: BrMethod::Si,
            val_backend: ValBackend::ListRank,
            threads: std::thread::available_parallelism().map_or(1, |p| p.get()),
            seed: 0,
            force_listrank: false,
            validate: cfg!(debug_assertions),
            record_trace: false,
        }
    }
}

impl SolveConfig {
    /// Compute the valuations of a strategy pair with the configured backend.
    pub fn compute_valuation(&self, g: &AugmentedGame, sp: &StrategyPair) -> ValuationTable {
        match self.val_backend {
            ValBackend::Seq => compute_valuation_seq(g, sp),
            ValBackend::ListRank => {
                if self.force_listrank {
                    crate::euler_rank::compute_valuation_listrank(g, sp, self.threads, self.seed)
                } else {
                    compute_valuation_parallel(g, sp, self.threads, self.seed)
                }
            }
        }
    }
}

/// A pair of positional strategies over the augmented game: `sigma` chooses
/// for Even vertices (possibly the sink), `tau` for Odd vertices. Slots of
/// the other owner and the sink hold [`NO_VERTEX`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyPair {
    pub sigma: Vec<Vertex>,
    pub tau: Vec<Vertex>,
}

impl StrategyPair {
    /// The strategy edge leaving `v`. Must not be called on the sink.
    pub fn choice(&self, g: &AugmentedGame, v: Vertex) -> Vertex {
        debug_assert_ne!(v, g.sink());
        match g.owner(v) {
            Owner::Even => self.sigma[v as usize],
            Owner::Odd => self.tau[v as usize],
        }
    }

    /// Pointwise update: each `(v, u)` entry redirects `v`'s choice to `u`.
    pub fn apply_switches(
        &mut self,
        g: &AugmentedGame,
        switches: &SwitchSet,
        side: Owner,
    ) -> Result<(), SwitchError> {
        let mut vertices: Vec<Vertex> = switches.iter().map(|&(v, _)| v).collect();
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(SwitchError::DuplicateVertex(w[0]));
        }
        for &(v, u) in switches.iter() {
            if v == g.sink() || g.owner(v) != side {
                return Err(SwitchError::WrongOwner(v));
            }
            if !g.successors(v).contains(&u) {
                return Err(SwitchError::NoSuchEdge { v, to: u });
            }
            match side {
                Owner::Even => self.sigma[v as usize] = u,
                Owner::Odd => self.tau[v as usize] = u,
            }
        }
        Ok(())
    }
}

/// A set of strategy switches with at most one entry per vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SwitchSet {
    entries: Vec<(Vertex, Vertex)>,
}

impl SwitchSet {
    pub fn new() -> Self {
        SwitchSet::default()
    }

    pub fn from_entries(entries: Vec<(Vertex, Vertex)>) -> Self {
        SwitchSet { entries }
    }

    pub fn push(&mut self, v: Vertex, to: Vertex) {
        self.entries.push((v, to));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (Vertex, Vertex)> {
        self.entries.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SwitchError {
    #[error("switch set has an entry for vertex {0} of the wrong owner")]
    WrongOwner(Vertex),
    #[error("switch set has two entries for vertex {0}")]
    DuplicateVertex(Vertex),
    #[error("switch set redirects vertex {v} along a non-existing edge to {to}")]
    NoSuchEdge { v: Vertex, to: Vertex },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("game has a cycle of {vertices} Odd vertices; run admissibility preprocessing first")]
    OddOnlyCycle { vertices: usize },
    #[error("one-player strategy improvement exceeded {bound} iterations")]
    BestResponseBound { bound: u64 },
    #[error("value iteration exceeded {bound} passes; the improver strategy admits an odd cycle")]
    PassBound { bound: usize },
    #[error("improvement invariant violated at major iteration {major}: {detail}")]
    ImprovementViolated { major: usize, detail: String },
    #[error(transparent)]
    Switch(#[from] SwitchError),
}

/// The initial strategies: Even retreats to the sink everywhere, Odd takes
/// the first listed successor. Fails if the game still has an Odd-only cycle,
/// since the sink strategy is inadmissible there.
pub fn initial_strategy(g: &AugmentedGame) -> Result<StrategyPair, SolveError> {
    let region = g.odd_only_region();
    let stuck = region.iter().filter(|&&b| b).count();
    if stuck > 0 {
        return Err(SolveError::OddOnlyCycle { vertices: stuck });
    }
    let n = g.total_vertices();
    let mut sigma = vec![NO_VERTEX; n];
    let mut tau = vec![NO_VERTEX; n];
    for v in g.vertices() {
        if v == g.sink() {
            continue;
        }
        match g.owner(v) {
            Owner::Even => sigma[v as usize] = g.sink(),
            Owner::Odd => tau[v as usize] = g.successors(v)[0],
        }
    }
    Ok(StrategyPair { sigma, tau })
}

/// All Even vertices that own a strictly improving edge, each paired with a
/// target of maximal valuation (smallest vertex id on ties).
pub fn even_switchable_set(
    g: &AugmentedGame,
    vals: &ValuationTable,
    sp: &StrategyPair,
) -> SwitchSet {
    let domain = g.domain();
    let mut set = SwitchSet::new();
    for v in g.vertices() {
        if v == g.sink() || g.owner(v) != Owner::Even {
            continue;
        }
        let succ = g.successors(v);
        let mut best = succ[0];
        for &u in &succ[1..] {
            match vals.compare_vertices(domain, u, best) {
                Ordering::Greater => best = u,
                Ordering::Equal if u < best => best = u,
                _ => {}
            }
        }
        let current = sp.sigma[v as usize];
        if best != current && vals.compare_vertices(domain, best, current) == Ordering::Greater {
            set.push(v, best);
        }
    }
    set
}

/// Instrumentation points for tests and analysis tools. All callbacks are
/// optional; `SolveHooks::none()` is the no-op default used by [`solve`].
pub struct SolveHooks<'a> {
    /// Called after every inner valuation computation with the strategy pair
    /// it belongs to. For the Bellman-Ford method this fires once per best
    /// response, with the fixed point.
    pub on_valuation: Option<&'a mut ValuationObserver<'a>>,
    /// Called once per major iteration, after the best response converged.
    pub on_major: Option<&'a mut dyn FnMut(&MajorRecord<'_>)>,
}

impl SolveHooks<'_> {
    pub fn none() -> Self {
        SolveHooks { on_valuation: None, on_major: None }
    }
}

/// Snapshot handed to the `on_major` hook.
pub struct MajorRecord<'e> {
    pub index: usize,
    pub strategies: &'e StrategyPair,
    pub vals: &'e ValuationTable,
    /// Inner iterations (switch rounds or value-iteration passes) spent on
    /// this best response.
    pub inner_iterations: usize,
}

/// Winning sets and strategies over the original game.
#[derive(Debug, Clone)]
pub struct Solution {
    /// Winner of every original vertex.
    pub winner: Vec<Owner>,
    /// Winning choice for vertices owned by their winner, `None` otherwise.
    /// Targets are original vertices; sink edges never appear.
    pub strategy: Vec<Option<Vertex>>,
    pub stats: SolveStats,
    /// Improver strategies per major iteration when trace recording is on.
    pub trace: Option<Vec<Vec<Vertex>>>,
}

impl Solution {
    pub fn w_even(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.winner
            .iter()
            .enumerate()
            .filter(|(_, &w)| w == Owner::Even)
            .map(|(v, _)| v as Vertex)
    }

    pub fn w_odd(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.winner
            .iter()
            .enumerate()
            .filter(|(_, &w)| w == Owner::Odd)
            .map(|(v, _)| v as Vertex)
    }

    /// PGSolver solution format.
    pub fn to_text(&self) -> String {
        crate::game::write_solution_text(&self.winner, &self.strategy)
    }
}

/// Counters and timings of one solve.
#[derive(Debug, Clone)]
pub struct SolveStats {
    /// Outer-loop executions, including the final pass that finds no
    /// switchable edge.
    pub major_iterations: usize,
    /// Total inner iterations across all best responses: switch rounds for
    /// the strategy improvement methods, passes for Bellman-Ford.
    pub br_iterations: usize,
    pub valuation_time: Duration,
    pub total_time: Duration,
    pub config: SolveConfig,
}

/// Solve the game. The input must be augmented and preprocessed; the
/// admissibility guard of [`initial_strategy`] rejects anything else.
pub fn solve(g: &AugmentedGame, cfg: &SolveConfig) -> Result<Solution, SolveError> {
    solve_with_hooks(g, cfg, SolveHooks::none())
}

/// [`solve`] with instrumentation callbacks.
pub fn solve_with_hooks(
    g: &AugmentedGame,
    cfg: &SolveConfig,
    mut hooks: SolveHooks<'_>,
) -> Result<Solution, SolveError> {
    let started = Instant::now();
    let mut sp = initial_strategy(g)?;
    let reset_tau = (cfg.br_method == BrMethod::SiReset).then(|| sp.tau.clone());
    let mut trace = cfg.record_trace.then(Vec::new);
    let mut prev_vals: Option<ValuationTable> = None;
    let mut major = 0usize;
    let mut br_total = 0usize;
    let mut valuation_time = Duration::ZERO;
    let mut noop = |_: &StrategyPair, _: &ValuationTable| {};

    loop {
        major += 1;
        if let (Some(reset), true) = (&reset_tau, major > 1) {
            sp.tau.clone_from(reset);
        }
        let observe: &mut ValuationObserver<'_> = match hooks.on_valuation.as_deref_mut() {
            Some(cb) => cb,
            None => &mut noop,
        };
        let br = match cfg.br_method {
            BrMethod::Si | BrMethod::SiReset => best_response_si_observed(g, &sp, cfg, observe)?,
            BrMethod::BellmanFord => best_response_bellman_ford_observed(g, &sp, observe)?,
        };
        sp.tau = br.tau;
        br_total += br.iterations;
        valuation_time += br.valuation_time;
        let vals = br.vals;

        if cfg.validate {
            if let Some(prev) = &prev_vals {
                check_improvement(g, prev, &vals, major)?;
            }
        }
        if let Some(cb) = hooks.on_major.as_deref_mut() {
            cb(&MajorRecord { index: major, strategies: &sp, vals: &vals, inner_iterations: br.iterations });
        }
        if let Some(tr) = trace.as_mut() {
            tr.push(sp.sigma.clone());
        }

        let switches = even_switchable_set(g, &vals, &sp);
        if switches.is_empty() {
            let (winner, strategy) = extract(g, &vals, &sp);
            return Ok(Solution {
                winner,
                strategy,
                stats: SolveStats {
                    major_iterations: major,
                    br_iterations: br_total,
                    valuation_time,
                    total_time: started.elapsed(),
                    config: cfg.clone(),
                },
                trace,
            });
        }
        sp.apply_switches(g, &switches, Owner::Even)?;
        if cfg.validate {
            prev_vals = Some(vals);
        }
    }
}

/// Between consecutive major iterations every valuation must be non-decreasing
/// with a strict increase somewhere.
fn check_improvement(
    g: &AugmentedGame,
    prev: &ValuationTable,
    cur: &ValuationTable,
    major: usize,
) -> Result<(), SolveError> {
    let domain = g.domain();
    let mut strict = false;
    for v in g.vertices() {
        match prev.compare_across(domain, v, cur, v) {
            Ordering::Greater => {
                return Err(SolveError::ImprovementViolated {
                    major,
                    detail: format!(
                        "vertex {v} decreased from {} to {}",
                        domain.render(&prev.get(v)),
                        domain.render(&cur.get(v))
                    ),
                });
            }
            Ordering::Less => strict = true,
            Ordering::Equal => {}
        }
    }
    if !strict {
        return Err(SolveError::ImprovementViolated {
            major,
            detail: "no vertex improved strictly".to_string(),
        });
    }
    Ok(())
}

/// Winning sets from the optimal strategy: Even wins exactly the vertices
/// whose valuation is top. Strategies are restricted to the winners' sets and
/// mapped back to original vertices.
fn extract(
    g: &AugmentedGame,
    vals: &ValuationTable,
    sp: &StrategyPair,
) -> (Vec<Owner>, Vec<Option<Vertex>>) {
    let base_n = g.base_vertices();
    let mut winner = Vec::with_capacity(base_n);
    let mut strategy = Vec::with_capacity(base_n);
    for v in 0..base_n as Vertex {
        let w = if vals.is_top(v) { Owner::Even } else { Owner::Odd };
        winner.push(w);
        let choice = match (g.owner(v), w) {
            (Owner::Even, Owner::Even) => {
                let to = sp.sigma[v as usize];
                debug_assert_ne!(to, g.sink(), "winning Even strategy escaped to the sink");
                Some(to)
            }
            (Owner::Odd, Owner::Odd) => Some(g.original_target(sp.tau[v as usize])),
            _ => None,
        };
        debug_assert!(choice.is_none_or(|to| (to as usize) < base_n));
        strategy.push(choice);
    }
    (winner, strategy)
}
