//! Independent correctness machinery: attractor computation, the recursive
//! solver, a one-player solution verifier, a seeded random game generator,
//! and exhaustive strategy enumeration for definition-level checks on small
//! games. None of it shares code with the strategy improvement engine.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{AugmentedGame, GameStructureError, Owner, ParityGame, Vertex, NO_VERTEX};

/// Winning partition with positional winning strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSolution {
    pub winner: Vec<Owner>,
    /// Winning choice for vertices owned by their winner, `None` otherwise.
    pub strategy: Vec<Option<Vertex>>,
}

struct Ctx<'g> {
    g: &'g ParityGame,
    rev_first: Vec<u32>,
    rev_targets: Vec<Vertex>,
}

impl<'g> Ctx<'g> {
    fn new(g: &'g ParityGame) -> Self {
        let n = g.vertex_count();
        let mut indeg = vec![0u32; n];
        for v in g.vertices() {
            for &u in g.successors(v) {
                indeg[u as usize] += 1;
            }
        }
        let mut rev_first = vec![0u32; n + 1];
        for v in 0..n {
            rev_first[v + 1] = rev_first[v] + indeg[v];
        }
        let mut rev_targets = vec![0 as Vertex; rev_first[n] as usize];
        let mut cursor = rev_first.clone();
        for v in g.vertices() {
            for &u in g.successors(v) {
                rev_targets[cursor[u as usize] as usize] = v;
                cursor[u as usize] += 1;
            }
        }
        Ctx { g, rev_first, rev_targets }
    }

    fn predecessors(&self, v: Vertex) -> &[Vertex] {
        &self.rev_targets[self.rev_first[v as usize] as usize..self.rev_first[v as usize + 1] as usize]
    }
}

/// Attractor of `target` for `player` within `alive`: `player`-owned vertices
/// join when one successor is attracted, opponent vertices when all their
/// alive successors are. For attracted `player` vertices outside the target
/// the attracting edge is recorded.
fn attract(
    ctx: &Ctx<'_>,
    alive: &[bool],
    player: Owner,
    target: &[bool],
) -> (Vec<bool>, Vec<Option<Vertex>>) {
    let g = ctx.g;
    let n = g.vertex_count();
    let mut in_attr = vec![false; n];
    let mut strategy = vec![None; n];
    let mut queue: Vec<Vertex> = Vec::new();
    for v in g.vertices() {
        if alive[v as usize] && target[v as usize] {
            in_attr[v as usize] = true;
            queue.push(v);
        }
    }
    // Opponent vertices join once all their alive successors have; every
    // join, the initial targets included, decrements the count below.
    let mut escapes = vec![0u32; n];
    for v in g.vertices() {
        if alive[v as usize] && g.owner(v) != player {
            escapes[v as usize] = g
                .successors(v)
                .iter()
                .filter(|&&u| alive[u as usize])
                .count() as u32;
        }
    }
    let mut at = 0;
    while at < queue.len() {
        let v = queue[at];
        at += 1;
        for &u in ctx.predecessors(v) {
            if !alive[u as usize] || in_attr[u as usize] {
                continue;
            }
            if g.owner(u) == player {
                in_attr[u as usize] = true;
                strategy[u as usize] = Some(v);
                queue.push(u);
            } else {
                escapes[u as usize] -= 1;
                if escapes[u as usize] == 0 {
                    in_attr[u as usize] = true;
                    queue.push(u);
                }
            }
        }
    }
    (in_attr, strategy)
}

/// Attractor of `target` for `player` over the whole game.
pub fn attractor(g: &ParityGame, player: Owner, target: &[Vertex]) -> Vec<bool> {
    let ctx = Ctx::new(g);
    let alive = vec![true; g.vertex_count()];
    let mut mask = vec![false; g.vertex_count()];
    for &v in target {
        mask[v as usize] = true;
    }
    attract(&ctx, &alive, player, &mask).0
}

/// The recursive solver. The second recursion of the classical formulation is
/// a tail call, eliminated here into a loop, so the stack depth is bounded by
/// the number of distinct priorities plus one.
pub fn zielonka_solve(g: &ParityGame) -> OracleSolution {
    let ctx = Ctx::new(g);
    let n = g.vertex_count();
    let mut winner = vec![Owner::Even; n];
    let mut strategy: Vec<Option<Vertex>> = vec![None; n];
    let alive = vec![true; n];
    let cap = g.domain().len() + 1;
    recurse(&ctx, alive, 1, cap, &mut winner, &mut strategy);
    OracleSolution { winner, strategy }
}

fn recurse(
    ctx: &Ctx<'_>,
    mut alive: Vec<bool>,
    depth: usize,
    cap: usize,
    winner: &mut [Owner],
    strategy: &mut [Option<Vertex>],
) {
    assert!(depth <= cap, "recursion exceeded the priority bound");
    let g = ctx.g;
    loop {
        let mut top: Option<u32> = None;
        for v in g.vertices() {
            if alive[v as usize] {
                top = Some(top.map_or(g.priority(v), |p| p.max(g.priority(v))));
            }
        }
        let Some(p) = top else { return };
        let player = if p % 2 == 0 { Owner::Even } else { Owner::Odd };
        let target: Vec<bool> = g
            .vertices()
            .map(|v| alive[v as usize] && g.priority(v) == p)
            .collect();
        let (in_a, astrat) = attract(ctx, &alive, player, &target);
        let sub: Vec<bool> = g
            .vertices()
            .map(|v| alive[v as usize] && !in_a[v as usize])
            .collect();
        recurse(ctx, sub.clone(), depth + 1, cap, winner, strategy);

        let opponent = player.opponent();
        let mut opp_region = vec![false; g.vertex_count()];
        let mut opp_any = false;
        for v in g.vertices() {
            if sub[v as usize] && winner[v as usize] == opponent {
                opp_region[v as usize] = true;
                opp_any = true;
            }
        }
        if !opp_any {
            // The player wins everything that is still alive: the recursion's
            // strategy inside the subgame, the attractor strategy towards the
            // top priority, and any alive edge on the top priority itself.
            for v in g.vertices() {
                if !alive[v as usize] {
                    continue;
                }
                winner[v as usize] = player;
                if g.owner(v) != player {
                    strategy[v as usize] = None;
                } else if in_a[v as usize] {
                    strategy[v as usize] = if g.priority(v) == p {
                        g.successors(v).iter().copied().find(|&u| alive[u as usize])
                    } else {
                        astrat[v as usize]
                    };
                    debug_assert!(strategy[v as usize].is_some());
                }
            }
            return;
        }
        let (in_b, bstrat) = attract(ctx, &alive, opponent, &opp_region);
        for v in g.vertices() {
            if !(alive[v as usize] && in_b[v as usize]) {
                continue;
            }
            winner[v as usize] = opponent;
            if g.owner(v) != opponent {
                strategy[v as usize] = None;
            } else if !opp_region[v as usize] {
                strategy[v as usize] = bstrat[v as usize];
                debug_assert!(strategy[v as usize].is_some());
            }
            alive[v as usize] = false;
        }
        // Solve what is left of `alive` in the next round.
    }
}

/// A concrete witness that a claimed solution is wrong.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Counterexample {
    #[error("vertex {v} is owned by its winner but has no strategy choice")]
    MissingStrategy { v: Vertex },
    #[error("strategy edge {v} -> {to} does not exist in the game")]
    ForeignStrategyEdge { v: Vertex, to: Vertex },
    #[error("strategy edge {v} -> {to} leaves the claimed winning set")]
    StrategyLeavesRegion { v: Vertex, to: Vertex },
    #[error("edge {from} -> {to} lets the opponent escape the claimed winning set")]
    EscapingEdge { from: Vertex, to: Vertex },
    #[error("cycle {cycle:?} with maximal priority {priority} lies inside the set claimed for {winner}")]
    BadCycle { winner: Owner, priority: u32, cycle: Vec<Vertex> },
}

/// Check a claimed partition with strategies against the game definition:
/// each winner's strategy must stay inside its set, the opponent must be
/// unable to leave it, and the strategy-restricted subgraph must not contain
/// a cycle whose maximal priority favours the opponent.
pub fn verify_solution(
    g: &ParityGame,
    winner: &[Owner],
    strategy: &[Option<Vertex>],
) -> Result<(), Counterexample> {
    let n = g.vertex_count();
    assert_eq!(winner.len(), n, "solution does not cover the game");
    assert_eq!(strategy.len(), n, "solution does not cover the game");
    for v in g.vertices() {
        let w = winner[v as usize];
        if g.owner(v) == w {
            let to = strategy[v as usize].ok_or(Counterexample::MissingStrategy { v })?;
            if !g.successors(v).contains(&to) {
                return Err(Counterexample::ForeignStrategyEdge { v, to });
            }
            if winner[to as usize] != w {
                return Err(Counterexample::StrategyLeavesRegion { v, to });
            }
        } else {
            for &u in g.successors(v) {
                if winner[u as usize] != w {
                    return Err(Counterexample::EscapingEdge { from: v, to: u });
                }
            }
        }
    }
    check_region_parity(g, winner, strategy, Owner::Even)?;
    check_region_parity(g, winner, strategy, Owner::Odd)?;
    Ok(())
}

/// Within `side`'s region, fix `side`'s strategy and keep all opponent edges;
/// no cycle through a priority of the opponent's parity may exist among
/// vertices of at most that priority.
fn check_region_parity(
    g: &ParityGame,
    winner: &[Owner],
    strategy: &[Option<Vertex>],
    side: Owner,
) -> Result<(), Counterexample> {
    let bad_parity = match side {
        Owner::Even => 1,
        Owner::Odd => 0,
    };
    let n = g.vertex_count();
    for &p in g.domain().as_slice().iter().rev() {
        if p % 2 != bad_parity {
            continue;
        }
        let active: Vec<bool> = g
            .vertices()
            .map(|v| winner[v as usize] == side && g.priority(v) <= p)
            .collect();
        // Materialize the restricted subgraph.
        let mut first = vec![0u32; n + 1];
        let mut targets: Vec<Vertex> = Vec::new();
        for v in g.vertices() {
            if active[v as usize] {
                if g.owner(v) == side {
                    let to = strategy[v as usize].unwrap();
                    if active[to as usize] {
                        targets.push(to);
                    }
                } else {
                    targets.extend(g.successors(v).iter().filter(|&&u| active[u as usize]));
                }
            }
            first[v as usize + 1] = targets.len() as u32;
        }
        let comp = tarjan_sccs(n, &active, &first, &targets);
        let mut comp_size = vec![0u32; n];
        for v in 0..n {
            if comp[v] != u32::MAX {
                comp_size[comp[v] as usize] += 1;
            }
        }
        for v in g.vertices() {
            if !active[v as usize] || g.priority(v) != p {
                continue;
            }
            let c = comp[v as usize];
            let edges = &targets[first[v as usize] as usize..first[v as usize + 1] as usize];
            let cyclic = comp_size[c as usize] > 1 || edges.contains(&v);
            if cyclic {
                let cycle = cycle_through(v, &comp, &first, &targets);
                return Err(Counterexample::BadCycle { winner: side, priority: p, cycle });
            }
        }
    }
    Ok(())
}

/// Iterative Tarjan. Returns a component id per active vertex, `u32::MAX`
/// elsewhere.
fn tarjan_sccs(n: usize, active: &[bool], first: &[u32], targets: &[Vertex]) -> Vec<u32> {
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut comp_count = 0u32;
    let mut frames: Vec<(u32, u32)> = Vec::new();
    for root in 0..n as u32 {
        if !active[root as usize] || index[root as usize] != UNSEEN {
            continue;
        }
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;
        frames.push((root, first[root as usize]));
        while let Some(&mut (v, ref mut cursor)) = frames.last_mut() {
            if *cursor < first[v as usize + 1] {
                let u = targets[*cursor as usize];
                *cursor += 1;
                if index[u as usize] == UNSEEN {
                    index[u as usize] = next_index;
                    low[u as usize] = next_index;
                    next_index += 1;
                    stack.push(u);
                    on_stack[u as usize] = true;
                    frames.push((u, first[u as usize]));
                } else if on_stack[u as usize] {
                    low[v as usize] = low[v as usize].min(index[u as usize]);
                }
            } else {
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    low[parent as usize] = low[parent as usize].min(low[v as usize]);
                }
                if low[v as usize] == index[v as usize] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w as usize] = false;
                        comp[w as usize] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }
    comp
}

/// A cycle through `v` inside its strongly connected component.
fn cycle_through(v: Vertex, comp: &[u32], first: &[u32], targets: &[Vertex]) -> Vec<Vertex> {
    let c = comp[v as usize];
    // BFS from v's successors back to v, staying in the component.
    let mut parent = vec![NO_VERTEX; comp.len()];
    let mut queue = Vec::new();
    for &u in &targets[first[v as usize] as usize..first[v as usize + 1] as usize] {
        if comp[u as usize] == c && parent[u as usize] == NO_VERTEX {
            parent[u as usize] = v;
            queue.push(u);
            if u == v {
                return vec![v];
            }
        }
    }
    let mut at = 0;
    while at < queue.len() {
        let w = queue[at];
        at += 1;
        for &u in &targets[first[w as usize] as usize..first[w as usize + 1] as usize] {
            if comp[u as usize] != c {
                continue;
            }
            if u == v {
                let mut tail = Vec::new();
                let mut cur = w;
                while cur != v {
                    tail.push(cur);
                    cur = parent[cur as usize];
                }
                tail.reverse();
                let mut cycle = Vec::with_capacity(tail.len() + 1);
                cycle.push(v);
                cycle.extend(tail);
                return cycle;
            }
            if parent[u as usize] == NO_VERTEX {
                parent[u as usize] = w;
                queue.push(u);
            }
        }
    }
    unreachable!("vertex lies on a cycle of its component");
}

/// Parameters of the seeded random game generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub n: usize,
    pub max_priority: u32,
    pub min_degree: usize,
    pub max_degree: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("degree bounds {min}..={max} are infeasible for {n} vertices")]
    InfeasibleDegrees { min: usize, max: usize, n: usize },
    #[error(transparent)]
    Structure(#[from] GameStructureError),
}

/// Generate a random game: uniform owners, uniform priorities in
/// `0..=max_priority`, out-degrees uniform in the given range, successors
/// sampled without replacement. Fully determined by the seed.
pub fn gen_random_game(spec: &GeneratorSpec) -> Result<ParityGame, GenError> {
    if spec.n == 0 || spec.min_degree < 1 || spec.min_degree > spec.max_degree || spec.max_degree > spec.n {
        return Err(GenError::InfeasibleDegrees {
            min: spec.min_degree,
            max: spec.max_degree,
            n: spec.n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut owner = Vec::with_capacity(spec.n);
    let mut priority = Vec::with_capacity(spec.n);
    let mut successors = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        owner.push(if rng.gen_bool(0.5) { Owner::Even } else { Owner::Odd });
        priority.push(rng.gen_range(0..=spec.max_priority));
        let degree = rng.gen_range(spec.min_degree..=spec.max_degree);
        let succ: Vec<Vertex> = rand::seq::index::sample(&mut rng, spec.n, degree)
            .into_iter()
            .map(|u| u as Vertex)
            .collect();
        successors.push(succ);
    }
    let names = vec![None; spec.n];
    Ok(ParityGame::from_parts(owner, priority, successors, names)?)
}

/// Number of positional strategies for `owner`, or `None` beyond `limit`.
pub fn strategy_space_size(degrees: impl Iterator<Item = usize>, limit: u64) -> Option<u64> {
    let mut product = 1u64;
    for d in degrees {
        product = product.checked_mul(d as u64)?;
        if product > limit {
            return None;
        }
    }
    Some(product)
}

/// Number of Odd strategies of an augmented game, or `None` beyond `limit`.
pub fn odd_strategy_count(g: &AugmentedGame, limit: u64) -> Option<u64> {
    strategy_space_size(
        g.vertices()
            .filter(|&v| v != g.sink() && g.owner(v) == Owner::Odd)
            .map(|v| g.successors(v).len()),
        limit,
    )
}

/// Enumerate every Odd strategy of an augmented game. The callback receives a
/// full-size strategy vector indexed by vertex.
pub fn for_each_odd_strategy(g: &AugmentedGame, mut f: impl FnMut(&[Vertex])) {
    let odd: Vec<Vertex> = g
        .vertices()
        .filter(|&v| v != g.sink() && g.owner(v) == Owner::Odd)
        .collect();
    let mut tau = vec![NO_VERTEX; g.total_vertices()];
    for &v in &odd {
        tau[v as usize] = g.successors(v)[0];
    }
    let mut choice = vec![0usize; odd.len()];
    loop {
        f(&tau);
        let mut pos = 0;
        loop {
            if pos == odd.len() {
                return;
            }
            let v = odd[pos];
            let succ = g.successors(v);
            choice[pos] += 1;
            if choice[pos] < succ.len() {
                tau[v as usize] = succ[choice[pos]];
                break;
            }
            choice[pos] = 0;
            tau[v as usize] = succ[0];
            pos += 1;
        }
    }
}

/// Decide the winner of every vertex by brute force over all strategy pairs,
/// evaluating the eventually-periodic play of each pair. `None` when the
/// strategy space exceeds `limit`. A definition-level oracle for small games.
pub fn exhaustive_partition(g: &ParityGame, limit: u64) -> Option<Vec<Owner>> {
    let even: Vec<Vertex> = g.vertices().filter(|&v| g.owner(v) == Owner::Even).collect();
    let odd: Vec<Vertex> = g.vertices().filter(|&v| g.owner(v) == Owner::Odd).collect();
    let even_count = strategy_space_size(even.iter().map(|&v| g.successors(v).len()), limit)?;
    let odd_count = strategy_space_size(odd.iter().map(|&v| g.successors(v).len()), limit)?;
    even_count.checked_mul(odd_count).filter(|&c| c <= limit)?;

    let n = g.vertex_count();
    let mut choice: Vec<Vertex> = g.vertices().map(|v| g.successors(v)[0]).collect();
    let mut won_by_even = vec![false; n];
    let mut even_idx = vec![0usize; even.len()];
    let mut stamp = vec![0u64; n];
    let mut pos_of = vec![0u32; n];
    let mut path: Vec<Vertex> = Vec::with_capacity(n);
    let mut generation = 0u64;
    loop {
        // One Even strategy fixed; check whether it wins against every Odd
        // strategy, per start vertex.
        let mut wins_all = vec![true; n];
        let mut odd_idx = vec![0usize; odd.len()];
        loop {
            for start in g.vertices() {
                if !wins_all[start as usize] {
                    continue;
                }
                generation += 1;
                path.clear();
                let mut cur = start;
                loop {
                    if stamp[cur as usize] == generation {
                        let from = pos_of[cur as usize] as usize;
                        let max_pri =
                            path[from..].iter().map(|&v| g.priority(v)).max().unwrap();
                        if max_pri % 2 == 1 {
                            wins_all[start as usize] = false;
                        }
                        break;
                    }
                    stamp[cur as usize] = generation;
                    pos_of[cur as usize] = path.len() as u32;
                    path.push(cur);
                    cur = choice[cur as usize];
                }
            }
            if !advance(g, &odd, &mut odd_idx, &mut choice) {
                break;
            }
        }
        for v in 0..n {
            won_by_even[v] = won_by_even[v] || wins_all[v];
        }
        if !advance(g, &even, &mut even_idx, &mut choice) {
            break;
        }
    }
    Some(
        won_by_even
            .into_iter()
            .map(|w| if w { Owner::Even } else { Owner::Odd })
            .collect(),
    )
}

/// Advance an odometer over the successor choices of `vertices`; false once
/// every combination has been visited.
fn advance(g: &ParityGame, vertices: &[Vertex], idx: &mut [usize], choice: &mut [Vertex]) -> bool {
    for (pos, &v) in vertices.iter().enumerate() {
        let succ = g.successors(v);
        idx[pos] += 1;
        if idx[pos] < succ.len() {
            choice[v as usize] = succ[idx[pos]];
            return true;
        }
        idx[pos] = 0;
        choice[v as usize] = succ[0];
    }
    false
}
