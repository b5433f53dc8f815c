//! Best responses for player Odd against a fixed admissible improver
//! strategy: one-player strategy improvement (the primary method) and a
//! Bellman-Ford style value iteration (the baseline), both over the
//! valuation algebra.
//!
//! An edge `(v, u)` of an Odd vertex is Odd-switchable when the valuation of
//! `u` is strictly below the valuation of `v`'s current choice. A strategy
//! without Odd-switchable edges satisfies the Bellman optimality equations
//! and is therefore a best response.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use crate::game::{AugmentedGame, Owner, Vertex};
use crate::si_engine::{SolveConfig, SolveError, StrategyPair, SwitchSet};
use crate::valuation::ValuationTable;

/// Callback invoked with every computed valuation and the strategy pair it
/// belongs to.
pub type ValuationObserver<'a> = dyn FnMut(&StrategyPair, &ValuationTable) + 'a;

/// Result of a best response computation.
#[derive(Debug, Clone)]
pub struct BestResponseResult {
    /// The best response; no Odd-switchable edge exists against it.
    pub tau: Vec<Vertex>,
    /// The fixed-point valuations of the improver strategy played against
    /// `tau`. They simultaneously minimize every vertex over all Odd
    /// strategies.
    pub vals: ValuationTable,
    /// Valuation computations (strategy improvement) or passes including the
    /// final confirming one (Bellman-Ford).
    pub iterations: usize,
    /// Time spent computing valuations.
    pub valuation_time: Duration,
}

/// All Odd vertices that own a strictly improving (valuation-decreasing)
/// alternative, each paired with a minimal successor (smallest id on ties).
pub fn odd_switchable_set(
    g: &AugmentedGame,
    sp: &StrategyPair,
    vals: &ValuationTable,
) -> SwitchSet {
    let domain = g.domain();
    let mut set = SwitchSet::new();
    for v in g.vertices() {
        if v == g.sink() || g.owner(v) != Owner::Odd {
            continue;
        }
        let succ = g.successors(v);
        let mut best = succ[0];
        for &u in &succ[1..] {
            match vals.compare_vertices(domain, u, best) {
                Ordering::Less => best = u,
                Ordering::Equal if u < best => best = u,
                _ => {}
            }
        }
        let current = sp.tau[v as usize];
        if best != current && vals.compare_vertices(domain, best, current) == Ordering::Less {
            set.push(v, best);
        }
    }
    set
}

/// One-player strategy improvement for Odd, starting from `sp.tau`.
pub fn best_response_si(
    g: &AugmentedGame,
    sp: &StrategyPair,
    cfg: &SolveConfig,
) -> Result<BestResponseResult, SolveError> {
    best_response_si_observed(g, sp, cfg, &mut |_, _| {})
}

/// [`best_response_si`] with a valuation observer.
pub fn best_response_si_observed(
    g: &AugmentedGame,
    sp: &StrategyPair,
    cfg: &SolveConfig,
    observe: &mut ValuationObserver<'_>,
) -> Result<BestResponseResult, SolveError> {
    let bound = g.total_vertices() as u64 * g.edge_count() as u64;
    let mut work = sp.clone();
    let mut iterations = 0usize;
    let mut valuation_time = Duration::ZERO;
    let mut prev: Option<ValuationTable> = None;
    loop {
        let t = Instant::now();
        let vals = cfg.compute_valuation(g, &work);
        valuation_time += t.elapsed();
        iterations += 1;
        observe(&work, &vals);
        if cfg.validate {
            if let Some(p) = &prev {
                check_descent(g, p, &vals)?;
            }
        }
        let switches = odd_switchable_set(g, &work, &vals);
        if switches.is_empty() {
            return Ok(BestResponseResult { tau: work.tau, vals, iterations, valuation_time });
        }
        if iterations as u64 > bound {
            return Err(SolveError::BestResponseBound { bound });
        }
        work.apply_switches(g, &switches, Owner::Odd)?;
        if cfg.validate {
            prev = Some(vals);
        }
    }
}

/// Each inner iteration must decrease at least one vertex and increase none.
fn check_descent(
    g: &AugmentedGame,
    prev: &ValuationTable,
    cur: &ValuationTable,
) -> Result<(), SolveError> {
    let domain = g.domain();
    let mut strict = false;
    for v in g.vertices() {
        match prev.compare_across(domain, v, cur, v) {
            Ordering::Less => {
                return Err(SolveError::ImprovementViolated {
                    major: 0,
                    detail: format!("inner iteration increased vertex {v}"),
                })
            }
            Ordering::Greater => strict = true,
            Ordering::Equal => {}
        }
    }
    if !strict {
        return Err(SolveError::ImprovementViolated {
            major: 0,
            detail: "inner iteration made no progress".to_string(),
        });
    }
    Ok(())
}

/// Bellman-Ford value iteration: the sink starts at the zero valuation and
/// everything else at top; each pass recomputes every vertex from the
/// previous pass. Even vertices follow the improver strategy, Odd vertices
/// take the minimum over their successors. The pass count includes both the
/// initial assignment pass and the final unchanged one.
pub fn best_response_bellman_ford(
    g: &AugmentedGame,
    sp: &StrategyPair,
) -> Result<BestResponseResult, SolveError> {
    best_response_bellman_ford_observed(g, sp, &mut |_, _| {})
}

/// [`best_response_bellman_ford`] with a valuation observer; it fires once,
/// with the fixed point.
pub fn best_response_bellman_ford_observed(
    g: &AugmentedGame,
    sp: &StrategyPair,
    observe: &mut ValuationObserver<'_>,
) -> Result<BestResponseResult, SolveError> {
    let started = Instant::now();
    let n = g.total_vertices();
    let d = g.domain().len();
    let domain = g.domain();
    let sink = g.sink();
    let bound = n + 1;

    let mut old = ValuationTable::new_all_top(n, d);
    old.set_zero(sink);
    let mut new = old.clone();
    let mut tau = sp.tau.clone();
    let mut passes = 0usize;
    loop {
        passes += 1;
        if passes > bound {
            return Err(SolveError::PassBound { bound });
        }
        // The first pass assigns every vertex and always counts as a change.
        let mut changed = passes == 1;
        for v in g.vertices() {
            if v == sink {
                continue;
            }
            let rank = g.priority_rank(v);
            match g.owner(v) {
                Owner::Even => {
                    new.assign_add_unit(v, &old, sp.sigma[v as usize], rank);
                }
                Owner::Odd => {
                    let succ = g.successors(v);
                    let mut best = succ[0];
                    for &u in &succ[1..] {
                        match old.compare_vertices(domain, u, best) {
                            Ordering::Less => best = u,
                            Ordering::Equal if u < best => best = u,
                            _ => {}
                        }
                    }
                    tau[v as usize] = best;
                    new.assign_add_unit(v, &old, best, rank);
                }
            }
            if !changed && !new.entries_equal(v, &old, v) {
                changed = true;
            }
        }
        std::mem::swap(&mut old, &mut new);
        if !changed {
            break;
        }
    }
    let vals = old;
    let pair = StrategyPair { sigma: sp.sigma.clone(), tau: tau.clone() };
    observe(&pair, &vals);
    Ok(BestResponseResult { tau, vals, iterations: passes, valuation_time: started.elapsed() })
}
