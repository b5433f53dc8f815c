//! Valuation computation over a fixed strategy pair.
//!
//! The strategy-restricted graph is a directed pseudoforest: the vertices
//! with a path to the sink form a tree rooted at the sink, everything else
//! hangs off cycles and has valuation top. The sequential algorithm walks the
//! tree backwards from the sink. The parallel pipeline replaces every
//! strategy edge with an up and a down copy, links them into an Euler tour of
//! the tree, and computes valuations as exclusive prefix sums over that
//! linked list with a splitter-based ranking scheme: random splitters cut the
//! list into sublists that are ranked independently, a reduced list over the
//! splitters is ranked sequentially, and a final pass combines the two.
//! Cyclic components never reach the reduced list's head chain and are marked
//! top wholesale.

use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{AugmentedGame, Vertex};
use crate::si_engine::StrategyPair;
use crate::valuation::{Priorities, ValuationTable};

/// End-of-list marker in successor slots.
pub const END: u32 = u32::MAX;
/// A start slot (or head) that has not received a splice.
pub const EMPTY: u32 = u32::MAX - 1;

const NO_RANK: u32 = u32::MAX;
const NO_SUBLIST: u32 = u32::MAX;
const NEXT_END: u32 = u32::MAX;
const NEXT_CYCLIC: u32 = u32::MAX - 1;

/// Minimum element count for the list-ranking pipeline to be worthwhile; the
/// sequential walk is used below it.
pub const LISTRANK_MIN_ELEMENTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ListStructureError {
    #[error("successor array must have two slots per vertex")]
    WrongLength,
    #[error("element {0} has successor {1} out of range")]
    SuccessorOutOfRange(u32, u32),
    #[error("element {0} has more than one predecessor")]
    MultiplePredecessors(u32),
    #[error("head {0} out of range")]
    HeadOutOfRange(u32),
    #[error("vertex {0} has weight rank {1} outside the domain")]
    RankOutOfRange(u32, u32),
}

/// The linked list of up and down edge copies produced by the Euler tour.
///
/// Vertex `v` contributes element `v` (its up edge, weight `-A_{pri(v)}`) and
/// element `v + n` (its down edge, weight `+A_{pri(v)}`); both reference the
/// child vertex of the edge. Elements reachable from the head form a simple
/// chain terminated by [`END`]; everything else lies on disjoint cycles.
#[derive(Debug, Clone)]
pub struct EulerList {
    vertex_count: usize,
    sink: Option<Vertex>,
    suc: Vec<u32>,
    head: u32,
    /// Rank of each vertex's priority in the domain; `NO_RANK` for priorities
    /// outside it (such vertices carry zero weight).
    vertex_rank: Vec<u32>,
    domain: Priorities,
}

impl EulerList {
    /// Assemble a list from raw parts, checking the structural invariants the
    /// ranking relies on: in-range successors and at most one predecessor per
    /// element. Intended for tests and micro-benchmarks; the solver builds
    /// lists with [`build_euler_list`].
    pub fn from_parts(
        domain: Priorities,
        vertex_rank: Vec<u32>,
        suc: Vec<u32>,
        head: u32,
    ) -> Result<Self, ListStructureError> {
        let n = vertex_rank.len();
        let m = 2 * n;
        if suc.len() != m {
            return Err(ListStructureError::WrongLength);
        }
        for (v, &r) in vertex_rank.iter().enumerate() {
            if r != NO_RANK && r as usize >= domain.len() {
                return Err(ListStructureError::RankOutOfRange(v as u32, r));
            }
        }
        let mut pred_seen = vec![false; m];
        for (e, &s) in suc.iter().enumerate() {
            if s == END {
                continue;
            }
            if s as usize >= m {
                return Err(ListStructureError::SuccessorOutOfRange(e as u32, s));
            }
            if pred_seen[s as usize] {
                return Err(ListStructureError::MultiplePredecessors(s));
            }
            pred_seen[s as usize] = true;
        }
        if head != EMPTY && head as usize >= m {
            return Err(ListStructureError::HeadOutOfRange(head));
        }
        Ok(EulerList { vertex_count: n, sink: None, suc, head, vertex_rank, domain })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn element_count(&self) -> usize {
        self.suc.len()
    }

    /// The up-edge element of `v`.
    pub fn up(&self, v: Vertex) -> u32 {
        v
    }

    /// The down-edge element of `v`.
    pub fn down(&self, v: Vertex) -> u32 {
        v + self.vertex_count as u32
    }

    pub fn head(&self) -> Option<u32> {
        (self.head != EMPTY).then_some(self.head)
    }

    pub fn successor(&self, e: u32) -> u32 {
        self.suc[e as usize]
    }

    pub fn domain(&self) -> &Priorities {
        &self.domain
    }

    /// Weight of an element as `(rank, sign)`; `None` rank means zero weight.
    fn weight(&self, e: u32) -> (Option<usize>, i64) {
        let n = self.vertex_count as u32;
        let (v, sign) = if e < n { (e, -1) } else { (e - n, 1) };
        match self.vertex_rank[v as usize] {
            NO_RANK => (None, sign),
            r => (Some(r as usize), sign),
        }
    }

    fn is_sink_element(&self, e: u32) -> bool {
        match self.sink {
            Some(s) => e == s || e == s + self.vertex_count as u32,
            None => false,
        }
    }
}

/// Build the Euler-tour list of the strategy graph, splicing vertices in
/// ascending id order. The sink contributes no elements; its start slot
/// begins empty, the first splice into it records the head of the list, and
/// the final join terminates the chain with [`END`].
pub fn build_euler_list(g: &AugmentedGame, sp: &StrategyPair) -> EulerList {
    let n = g.total_vertices();
    let sink = g.sink();
    let mut suc = vec![END; 2 * n];
    let mut head = EMPTY;
    // start[v] points at the element that receives the next splice into v's
    // chain: initially v's own down edge, afterwards the up edge of the most
    // recently spliced child.
    let mut start: Vec<u32> = (0..n as u32).map(|v| v + n as u32).collect();
    start[sink as usize] = EMPTY;
    for v in g.vertices() {
        if v == sink {
            continue;
        }
        let parent = sp.choice(g, v);
        let old = start[parent as usize];
        start[parent as usize] = v; // up(v)
        if old == EMPTY {
            head = v + n as u32; // down(v)
        } else {
            suc[old as usize] = v + n as u32;
        }
    }
    for v in g.vertices() {
        if v == sink {
            suc_terminate(&mut suc, start[v as usize]);
        } else {
            suc[start[v as usize] as usize] = v; // up(v)
        }
    }
    EulerList {
        vertex_count: n,
        sink: Some(sink),
        suc,
        head,
        vertex_rank: vertex_ranks(g),
        domain: g.domain().clone(),
    }
}

fn suc_terminate(suc: &mut [u32], slot: u32) {
    if slot != EMPTY {
        suc[slot as usize] = END;
    }
}

fn vertex_ranks(g: &AugmentedGame) -> Vec<u32> {
    g.vertices()
        .map(|v| g.priority_rank(v).map_or(NO_RANK, |r| r as u32))
        .collect()
}

/// Shared mutable buffer for phase-parallel writes to disjoint indices.
///
/// Safety rests on the claiming discipline of the callers: within one phase
/// every index is written by at most one thread, and phases are separated by
/// thread joins.
struct SharedBuf<'a, T> {
    ptr: *mut T,
    len: usize,
    _marker: std::marker::PhantomData<&'a mut [T]>,
}

unsafe impl<T: Send> Sync for SharedBuf<'_, T> {}

impl<'a, T> SharedBuf<'a, T> {
    fn new(data: &'a mut [T]) -> Self {
        SharedBuf { ptr: data.as_mut_ptr(), len: data.len(), _marker: std::marker::PhantomData }
    }

    /// # Safety
    /// No other thread may touch index `i` during the current phase.
    unsafe fn write(&self, i: usize, value: T) {
        debug_assert!(i < self.len);
        unsafe { self.ptr.add(i).write(value) };
    }

    /// # Safety
    /// No other thread may touch `start..start + len` during the current phase.
    #[allow(clippy::mut_from_ref)]
    unsafe fn slice_mut(&self, start: usize, len: usize) -> &mut [T] {
        debug_assert!(start + len <= self.len);
        unsafe { std::slice::from_raw_parts_mut(self.ptr.add(start), len) }
    }
}

/// Parallel Euler-tour construction. Concurrent splices into the same parent
/// race only on the parent's start slot, resolved with an atomic exchange; a
/// different interleaving yields a different but equally valid tour.
pub fn build_euler_list_parallel(g: &AugmentedGame, sp: &StrategyPair, workers: usize) -> EulerList {
    if workers <= 1 {
        return build_euler_list(g, sp);
    }
    let n = g.total_vertices();
    let sink = g.sink();
    let mut suc = vec![END; 2 * n];
    let start: Vec<AtomicU32> = (0..n as u32)
        .map(|v| AtomicU32::new(if v == sink { EMPTY } else { v + n as u32 }))
        .collect();
    let head = AtomicU32::new(EMPTY);
    let chunk = n.div_ceil(workers);
    {
        let suc_buf = SharedBuf::new(&mut suc);
        let start = &start;
        let head = &head;
        std::thread::scope(|scope| {
            for w in 0..workers {
                let lo = (w * chunk).min(n);
                let hi = ((w + 1) * chunk).min(n);
                let suc_buf = &suc_buf;
                scope.spawn(move || {
                    for v in lo as u32..hi as u32 {
                        if v == sink {
                            continue;
                        }
                        let parent = sp.choice(g, v);
                        // Claim the parent's slot; the previous occupant is
                        // ours alone to link, so the write below is unique.
                        let old = start[parent as usize].swap(v, AtomicOrdering::Relaxed);
                        if old == EMPTY {
                            head.store(v + n as u32, AtomicOrdering::Relaxed);
                        } else {
                            unsafe { suc_buf.write(old as usize, v + n as u32) };
                        }
                    }
                });
            }
        });
        // Final join: every final start slot is a distinct element, so the
        // writes stay disjoint.
        std::thread::scope(|scope| {
            for w in 0..workers {
                let lo = (w * chunk).min(n);
                let hi = ((w + 1) * chunk).min(n);
                let suc_buf = &suc_buf;
                scope.spawn(move || {
                    for v in lo as u32..hi as u32 {
                        let slot = start[v as usize].load(AtomicOrdering::Relaxed);
                        if v == sink {
                            if slot != EMPTY {
                                unsafe { suc_buf.write(slot as usize, END) };
                            }
                        } else {
                            unsafe { suc_buf.write(slot as usize, v) };
                        }
                    }
                });
            }
        });
    }
    EulerList {
        vertex_count: n,
        sink: Some(sink),
        suc,
        head: head.into_inner(),
        vertex_rank: vertex_ranks(g),
        domain: g.domain().clone(),
    }
}

/// Exclusive prefix sums over the list, or a top mark for elements that the
/// head chain cannot reach.
#[derive(Debug, Clone)]
pub struct RankResult {
    dim: usize,
    counts: Vec<i64>,
    sublist_of: Vec<u32>,
    reduced_top: Vec<bool>,
}

impl RankResult {
    pub fn is_top(&self, e: u32) -> bool {
        match self.sublist_of[e as usize] {
            NO_SUBLIST => true,
            s => self.reduced_top[s as usize],
        }
    }

    /// The exclusive prefix sum at `e`, or `None` when the element is marked
    /// top.
    pub fn rank(&self, e: u32) -> Option<&[i64]> {
        if self.is_top(e) {
            None
        } else {
            let i = e as usize * self.dim;
            Some(&self.counts[i..i + self.dim])
        }
    }
}

/// Rank the list: exclusive prefix sums from the head for every element on
/// the head chain, top marks for everything else. The head is always splitter
/// zero; further splitters are sampled uniformly without replacement. The
/// result is the same for every seed and worker count.
pub fn rank_list(list: &EulerList, workers: usize, seed: u64) -> RankResult {
    let m = list.element_count();
    let d = list.domain.len();
    let workers = workers.max(1);

    // Splitter selection. The head must start a sublist so that the whole
    // head chain ends up in the reduced list.
    let mut splitters: Vec<u32> = Vec::new();
    let mut splitter_idx = vec![NO_SUBLIST; m];
    if list.head != EMPTY {
        splitters.push(list.head);
        splitter_idx[list.head as usize] = 0;
    }
    if m > 0 {
        let log2m = (m.max(2) as f64).log2();
        let extra = (m as f64 / (workers as f64 * log2m)).ceil() as usize;
        let extra = extra.max(workers).min(m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for idx in rand::seq::index::sample(&mut rng, m, extra) {
            let e = idx as u32;
            if splitter_idx[e as usize] != NO_SUBLIST || list.is_sink_element(e) {
                continue;
            }
            splitter_idx[e as usize] = splitters.len() as u32;
            splitters.push(e);
        }
    }
    let s = splitters.len();

    // Phase 1: walk each sublist, recording local exclusive prefixes and the
    // owning sublist of every element visited. Sublists are disjoint: walks
    // start at splitters and stop at the next splitter or the end.
    let mut sublist_of = vec![NO_SUBLIST; m];
    let mut counts = vec![0i64; m * d];
    let mut totals = vec![0i64; s * d];
    let mut nexts = vec![NEXT_END; s];

    let walk = |i: usize,
                acc: &mut [i64],
                write_sub: &mut dyn FnMut(usize, u32),
                write_counts: &mut dyn FnMut(usize, &[i64])| {
        acc.fill(0);
        let mut cur = splitters[i];
        let mut steps = 0usize;
        loop {
            write_sub(cur as usize, i as u32);
            write_counts(cur as usize, acc);
            let (rank, sign) = list.weight(cur);
            if let Some(r) = rank {
                acc[r] += sign;
            }
            steps += 1;
            let next = list.suc[cur as usize];
            if next == END {
                return NEXT_END;
            }
            let idx = splitter_idx[next as usize];
            if idx != NO_SUBLIST {
                return if idx as usize == i { NEXT_CYCLIC } else { idx };
            }
            if steps > m {
                // Cycle guard; unreachable for structurally valid lists.
                return NEXT_CYCLIC;
            }
            cur = next;
        }
    };

    if workers == 1 || s <= 1 {
        let mut acc = vec![0i64; d];
        for i in 0..s {
            let next = walk(
                i,
                &mut acc,
                &mut |e, v| sublist_of[e] = v,
                &mut |e, c| counts[e * d..e * d + d].copy_from_slice(c),
            );
            nexts[i] = next;
            totals[i * d..i * d + d].copy_from_slice(&acc);
        }
    } else {
        let chunk = s.div_ceil(workers);
        let sub_buf = SharedBuf::new(&mut sublist_of);
        let cnt_buf = SharedBuf::new(&mut counts);
        std::thread::scope(|scope| {
            let mut totals_rest: &mut [i64] = &mut totals;
            let mut nexts_rest: &mut [u32] = &mut nexts;
            for w in 0..workers {
                let lo = (w * chunk).min(s);
                let hi = ((w + 1) * chunk).min(s);
                let (totals_chunk, tr) = totals_rest.split_at_mut((hi - lo) * d);
                let (nexts_chunk, nr) = nexts_rest.split_at_mut(hi - lo);
                totals_rest = tr;
                nexts_rest = nr;
                let sub_buf = &sub_buf;
                let cnt_buf = &cnt_buf;
                let walk = &walk;
                scope.spawn(move || {
                    let mut acc = vec![0i64; d];
                    for i in lo..hi {
                        // SAFETY: sublists are element-disjoint, so every
                        // index is written by exactly one walk.
                        let next = walk(
                            i,
                            &mut acc,
                            &mut |e, v| unsafe { sub_buf.write(e, v) },
                            &mut |e, c| unsafe { cnt_buf.slice_mut(e * d, d) }.copy_from_slice(c),
                        );
                        nexts_chunk[i - lo] = next;
                        totals_chunk[(i - lo) * d..(i - lo) * d + d].copy_from_slice(&acc);
                    }
                });
            }
        });
    }

    // Phase 2: rank the reduced list sequentially from the head splitter.
    // Splitters the head chain never reaches stay marked top.
    let mut reduced_top = vec![true; s];
    let mut reduced = vec![0i64; s * d];
    if list.head != EMPTY {
        let mut acc = vec![0i64; d];
        let mut i = 0usize;
        loop {
            if !reduced_top[i] {
                debug_assert!(false, "reduced chain from the head revisited splitter {i}");
                break;
            }
            reduced_top[i] = false;
            reduced[i * d..i * d + d].copy_from_slice(&acc);
            for (a, t) in acc.iter_mut().zip(&totals[i * d..i * d + d]) {
                *a += t;
            }
            match nexts[i] {
                NEXT_END => break,
                NEXT_CYCLIC => {
                    debug_assert!(false, "head chain ran into a cycle");
                    break;
                }
                j => i = j as usize,
            }
        }
    }

    // Phase 3: combine. Element rank = reduced rank of its splitter plus the
    // local prefix. Chunked slices keep the writes disjoint without locks.
    let combine = |counts_chunk: &mut [i64], subs: &[u32]| {
        for (e, &sub) in subs.iter().enumerate() {
            if sub != NO_SUBLIST && !reduced_top[sub as usize] {
                let base = &reduced[sub as usize * d..sub as usize * d + d];
                for (c, b) in counts_chunk[e * d..e * d + d].iter_mut().zip(base) {
                    *c += b;
                }
            }
        }
    };
    if workers == 1 || m < 2 * workers {
        combine(&mut counts, &sublist_of);
    } else {
        let chunk = m.div_ceil(workers);
        std::thread::scope(|scope| {
            let mut counts_rest: &mut [i64] = &mut counts;
            let mut subs_rest: &[u32] = &sublist_of;
            for w in 0..workers {
                let lo = (w * chunk).min(m);
                let hi = ((w + 1) * chunk).min(m);
                let (counts_chunk, cr) = counts_rest.split_at_mut((hi - lo) * d);
                let (subs_chunk, sr) = subs_rest.split_at(hi - lo);
                counts_rest = cr;
                subs_rest = sr;
                let combine = &combine;
                scope.spawn(move || combine(counts_chunk, subs_chunk));
            }
        });
    }

    RankResult { dim: d, counts, sublist_of, reduced_top }
}

/// Per-vertex valuations from element ranks: the exclusive prefix at a
/// vertex's up edge counts exactly the priorities on its path to the sink,
/// the vertex itself included. Vertices with top-marked elements get top, the
/// sink gets zero.
pub fn valuations_from_ranks(list: &EulerList, ranks: &RankResult) -> ValuationTable {
    let n = list.vertex_count();
    let d = list.domain.len();
    let sink = list.sink.expect("valuations need a list built from a game");
    let mut table = ValuationTable::new_all_top(n, d);
    table.set_zero(sink);
    for v in 0..n as Vertex {
        if v == sink {
            continue;
        }
        if let Some(counts) = ranks.rank(list.up(v)) {
            table.set_finite(v, counts);
        }
    }
    table
}

/// Sequential valuation computation: a backwards breadth-first walk from the
/// sink over the strategy-restricted graph. Vertices with no strategy path to
/// the sink keep valuation top.
pub fn compute_valuation_seq(g: &AugmentedGame, sp: &StrategyPair) -> ValuationTable {
    let n = g.total_vertices();
    let d = g.domain().len();
    let sink = g.sink();
    // Reverse adjacency of the strategy graph (one out-edge per vertex).
    let mut indeg = vec![0u32; n];
    for v in g.vertices() {
        if v != sink {
            indeg[sp.choice(g, v) as usize] += 1;
        }
    }
    let mut first = vec![0u32; n + 1];
    for v in 0..n {
        first[v + 1] = first[v] + indeg[v];
    }
    let mut children = vec![0 as Vertex; first[n] as usize];
    let mut cursor = first.clone();
    for v in g.vertices() {
        if v != sink {
            let p = sp.choice(g, v) as usize;
            children[cursor[p] as usize] = v;
            cursor[p] += 1;
        }
    }
    let mut table = ValuationTable::new_all_top(n, d);
    table.set_zero(sink);
    let mut queue = Vec::with_capacity(n);
    queue.push(sink);
    let mut at = 0;
    while at < queue.len() {
        let cur = queue[at];
        at += 1;
        for i in first[cur as usize]..first[cur as usize + 1] {
            let child = children[i as usize];
            table.copy_entry(child, cur);
            table.bump(child, g.priority_rank(child));
            queue.push(child);
        }
    }
    table
}

/// The full parallel pipeline: build the Euler tour, rank it, project vertex
/// valuations. Always exactly equal to [`compute_valuation_seq`].
pub fn compute_valuation_listrank(
    g: &AugmentedGame,
    sp: &StrategyPair,
    workers: usize,
    seed: u64,
) -> ValuationTable {
    let list = build_euler_list_parallel(g, sp, workers);
    let ranks = rank_list(&list, workers, seed);
    valuations_from_ranks(&list, &ranks)
}

/// The list-ranking backend with its profitability gate: below
/// `p^2 ln n` elements (or a small absolute floor) the parallel pipeline is
/// not work-efficient and the sequential walk runs instead.
pub fn compute_valuation_parallel(
    g: &AugmentedGame,
    sp: &StrategyPair,
    workers: usize,
    seed: u64,
) -> ValuationTable {
    let m = 2 * g.total_vertices();
    let workers = workers.max(1);
    let threshold = ((workers * workers) as f64) * (m.max(2) as f64).ln();
    if m < LISTRANK_MIN_ELEMENTS || (m as f64) <= threshold {
        compute_valuation_seq(g, sp)
    } else {
        compute_valuation_listrank(g, sp, workers, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{augment_with_sink, parse_pgsolver, preprocess_admissible, Owner};
    use crate::oracle::{gen_random_game, GeneratorSpec};
    use crate::si_engine::initial_strategy;
    use rand::Rng;

    fn g2_augmented() -> AugmentedGame {
        let g = parse_pgsolver("parity 2;\n0 2 0 1;\n1 1 1 0,2;\n2 4 0 1;").unwrap();
        preprocess_admissible(augment_with_sink(g)).0
    }

    /// Four Even vertices arranged so the strategy graph is the two-level
    /// tree used in the docs: b, c children of the sink; d, e children of b.
    fn two_level_tree() -> (AugmentedGame, StrategyPair) {
        let g = parse_pgsolver("parity 3;\n0 2 0 2;\n1 1 0 0;\n2 3 0 0;\n3 1 0 0;").unwrap();
        let aug = augment_with_sink(g);
        let mut sp = initial_strategy(&aug).unwrap();
        // b = 0 -> sink, c = 1 -> sink, d = 2 -> b, e = 3 -> b.
        sp.sigma[2] = 0;
        sp.sigma[3] = 0;
        (aug, sp)
    }

    #[test]
    fn seq_valuation_matches_hand_trace() {
        let g = g2_augmented();
        let sp = initial_strategy(&g).unwrap();
        let table = compute_valuation_seq(&g, &sp);
        let d = g.domain();
        assert_eq!(d.render(&table.get(0)), "{1:0, 2:1, 4:0}");
        assert_eq!(d.render(&table.get(1)), "{1:1, 2:1, 4:0}");
        assert_eq!(d.render(&table.get(2)), "{1:0, 2:0, 4:1}");
        assert_eq!(d.render(&table.get(g.sink())), "{1:0, 2:0, 4:0}");
    }

    #[test]
    fn seq_valuation_marks_strategy_cycles_top() {
        let g = g2_augmented();
        let mut sp = initial_strategy(&g).unwrap();
        sp.sigma[0] = 1;
        sp.sigma[2] = 1;
        let table = compute_valuation_seq(&g, &sp);
        assert!(table.is_top(0) && table.is_top(1) && table.is_top(2));
        assert!(!table.is_top(g.sink()));
    }

    #[test]
    fn build_produces_the_documented_tour() {
        let (g, sp) = two_level_tree();
        let list = build_euler_list(&g, &sp);
        // Ascending splice order: 0 into sink (head), 1 into sink, 2 into 0,
        // 3 into 0. Chain: down(0) down(2) up(2) down(3) up(3) up(0) down(1)
        // up(1) END.
        let n = g.total_vertices() as u32;
        assert_eq!(list.head(), Some(list.down(0)));
        let expect = [n, 2 + n, 2, 3 + n, 3, 0, 1 + n, 1];
        for w in expect.windows(2) {
            assert_eq!(list.successor(w[0]), w[1], "chain mismatch at {}", w[0]);
        }
        assert_eq!(list.successor(*expect.last().unwrap()), END);
    }

    #[test]
    fn build_single_vertex_chain() {
        let g = parse_pgsolver("parity 0;\n0 2 0 0;").unwrap();
        let aug = augment_with_sink(g);
        let sp = initial_strategy(&aug).unwrap();
        let list = build_euler_list(&aug, &sp);
        assert_eq!(list.head(), Some(list.down(0)));
        assert_eq!(list.successor(list.down(0)), list.up(0));
        assert_eq!(list.successor(list.up(0)), END);
    }

    #[test]
    fn build_self_loop_forms_unreachable_cycles() {
        let g = parse_pgsolver("parity 0;\n0 2 0 0;").unwrap();
        let aug = augment_with_sink(g);
        let mut sp = initial_strategy(&aug).unwrap();
        sp.sigma[0] = 0;
        let list = build_euler_list(&aug, &sp);
        assert_eq!(list.head(), None);
        // Both elements lie on cycles disjoint from any head chain.
        let ranks = rank_list(&list, 1, 0);
        assert!(ranks.is_top(list.up(0)));
        assert!(ranks.is_top(list.down(0)));
        let vals = valuations_from_ranks(&list, &ranks);
        assert!(vals.is_top(0));
        assert!(!vals.is_top(aug.sink()));
    }

    #[test]
    fn rank_of_up_edge_counts_the_path() {
        let (g, sp) = two_level_tree();
        let list = build_euler_list(&g, &sp);
        let ranks = rank_list(&list, 1, 0);
        // Vertex 2 (priority 3) below vertex 0 (priority 2): the exclusive
        // prefix at its up edge counts both.
        let d = g.domain();
        assert_eq!(d.as_slice(), &[1, 2, 3]);
        assert_eq!(ranks.rank(list.up(2)).unwrap(), &[0, 1, 1]);
        // Head has the empty prefix.
        assert_eq!(ranks.rank(list.head().unwrap()).unwrap(), &[0, 0, 0]);
        let vals = valuations_from_ranks(&list, &ranks);
        assert_eq!(d.render(&vals.get(2)), "{1:0, 2:1, 3:1}");
        assert_eq!(d.render(&vals.get(3)), "{1:1, 2:1, 3:0}");
        assert_eq!(vals, compute_valuation_seq(&g, &sp));
    }

    #[test]
    fn head_chain_weights_telescope_to_zero() {
        for seed in 0..20 {
            let n = 3 + (seed as usize * 11) % 60;
            let g = gen_random_game(&GeneratorSpec {
                n,
                max_priority: 6,
                min_degree: 1,
                max_degree: n.min(4),
                seed: 3_000 + seed,
            })
            .unwrap();
            let (pre, _) = preprocess_admissible(augment_with_sink(g));
            let sp = initial_strategy(&pre).unwrap();
            let list = build_euler_list(&pre, &sp);
            let d = pre.domain().len();
            let mut total = vec![0i64; d];
            let mut seen = vec![false; list.element_count()];
            let mut cur = list.head();
            while let Some(e) = cur {
                assert!(!seen[e as usize], "head chain revisited an element");
                seen[e as usize] = true;
                let (rank, sign) = list.weight(e);
                if let Some(r) = rank {
                    total[r] += sign;
                }
                let next = list.successor(e);
                cur = (next != END).then_some(next);
            }
            assert!(total.iter().all(|&c| c == 0), "seed {seed}: tour total {total:?}");
            // Every vertex reachable from the sink appears exactly twice.
            let vals = compute_valuation_seq(&pre, &sp);
            for v in pre.vertices() {
                if v == pre.sink() {
                    continue;
                }
                let expected = !vals.is_top(v);
                assert_eq!(seen[list.up(v) as usize], expected, "seed {seed}, up({v})");
                assert_eq!(seen[list.down(v) as usize], expected, "seed {seed}, down({v})");
            }
        }
    }

    #[test]
    fn subtree_segments_balance_out() {
        // For every vertex on the head chain, the segment from its down edge
        // to its up edge sums to zero. Checked on the documented fixture and
        // on random games under their initial strategies.
        let mut cases: Vec<(AugmentedGame, StrategyPair)> = vec![two_level_tree()];
        for seed in 0..10 {
            let n = 3 + (seed as usize * 17) % 80;
            let g = gen_random_game(&GeneratorSpec {
                n,
                max_priority: 6,
                min_degree: 1,
                max_degree: n.min(4),
                seed: 5_000 + seed,
            })
            .unwrap();
            let (pre, _) = preprocess_admissible(augment_with_sink(g));
            let sp = initial_strategy(&pre).unwrap();
            cases.push((pre, sp));
        }
        for (g, sp) in &cases {
            let list = build_euler_list(g, sp);
            let d = g.domain().len();
            let mut on_chain = vec![false; list.element_count()];
            let mut cur = list.head();
            while let Some(e) = cur {
                on_chain[e as usize] = true;
                let next = list.successor(e);
                cur = (next != END).then_some(next);
            }
            for v in 0..g.total_vertices() as Vertex {
                if v == g.sink() || !on_chain[list.down(v) as usize] {
                    continue;
                }
                let mut total = vec![0i64; d];
                let mut cur = list.down(v);
                loop {
                    let (rank, sign) = list.weight(cur);
                    if let Some(r) = rank {
                        total[r] += sign;
                    }
                    if cur == list.up(v) {
                        break;
                    }
                    cur = list.successor(cur);
                }
                assert!(total.iter().all(|&c| c == 0), "segment of {v}: {total:?}");
            }
        }
    }

    #[test]
    fn rank_matches_sequential_prefix_oracle_on_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for round in 0..40 {
            let len = rng.gen_range(1..=2000usize);
            let domain = Priorities::from_values([0u32]);
            // One element per vertex, chained in random layout order.
            let mut order: Vec<u32> = (0..len as u32)
                .map(|v| if rng.gen_bool(0.5) { v } else { v + len as u32 })
                .collect();
            // Shuffle which vertices appear where along the chain.
            for i in (1..order.len()).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            let vertex_rank: Vec<u32> =
                (0..len).map(|_| if rng.gen_bool(0.9) { 0 } else { NO_RANK }).collect();
            let mut suc = vec![END; 2 * len];
            for w in order.windows(2) {
                suc[w[0] as usize] = w[1];
            }
            let list =
                EulerList::from_parts(domain, vertex_rank, suc, order[0]).unwrap();
            let workers = rng.gen_range(1..=4);
            let ranks = rank_list(&list, workers, round as u64);
            let mut acc = 0i64;
            for &e in &order {
                assert_eq!(ranks.rank(e).unwrap(), &[acc], "round {round}");
                let (rank, sign) = list.weight(e);
                if rank.is_some() {
                    acc += sign;
                }
            }
        }
    }

    #[test]
    fn rank_marks_cycles_top() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let len = rng.gen_range(1..=500usize);
            let domain = Priorities::from_values([1u32]);
            let vertex_rank = vec![0u32; len];
            let mut suc = vec![END; 2 * len];
            // A single cycle over the up edges, downs left dangling.
            for v in 0..len as u32 {
                suc[v as usize] = (v + 1) % len as u32;
            }
            let list = EulerList::from_parts(domain, vertex_rank, suc, EMPTY).unwrap();
            let ranks = rank_list(&list, rng.gen_range(1..=4), rng.gen());
            for e in 0..list.element_count() as u32 {
                assert!(ranks.is_top(e));
            }
        }
    }

    #[test]
    fn listrank_equals_seq_for_any_workers_and_seeds() {
        for seed in 0..15 {
            let n = 2 + (seed as usize * 97) % 300;
            let g = gen_random_game(&GeneratorSpec {
                n,
                max_priority: 6,
                min_degree: 1,
                max_degree: n.min(4),
                seed: 11_000 + seed,
            })
            .unwrap();
            let (pre, _) = preprocess_admissible(augment_with_sink(g));
            let mut sp = initial_strategy(&pre).unwrap();
            // Random but valid strategies exercise pseudotrees as well.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for v in pre.vertices() {
                if v == pre.sink() {
                    continue;
                }
                let succ = pre.successors(v);
                let pick = succ[rng.gen_range(0..succ.len())];
                match pre.owner(v) {
                    Owner::Even => sp.sigma[v as usize] = pick,
                    Owner::Odd => sp.tau[v as usize] = pick,
                }
            }
            let reference = compute_valuation_seq(&pre, &sp);
            for workers in [1, 2, 4] {
                for rank_seed in [0u64, 1, 2] {
                    let got = compute_valuation_listrank(&pre, &sp, workers, rank_seed);
                    assert_eq!(got, reference, "seed {seed}, workers {workers}, rank_seed {rank_seed}");
                }
            }
        }
    }

    #[test]
    fn listrank_equals_seq_on_a_large_forest() {
        let g = gen_random_game(&GeneratorSpec {
            n: 100_000,
            max_priority: 6,
            min_degree: 1,
            max_degree: 4,
            seed: 0xF0E57,
        })
        .unwrap();
        let (pre, _) = preprocess_admissible(augment_with_sink(g));
        let mut sp = initial_strategy(&pre).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for v in pre.vertices() {
            if v == pre.sink() {
                continue;
            }
            let succ = pre.successors(v);
            let pick = succ[rng.gen_range(0..succ.len())];
            match pre.owner(v) {
                Owner::Even => sp.sigma[v as usize] = pick,
                Owner::Odd => sp.tau[v as usize] = pick,
            }
        }
        let reference = compute_valuation_seq(&pre, &sp);
        for workers in [1usize, 2, 8] {
            for seed in [0u64, 1, 2] {
                let got = compute_valuation_listrank(&pre, &sp, workers, seed);
                assert_eq!(got, reference, "workers {workers}, seed {seed}");
            }
        }
    }

    #[test]
    fn parallel_gate_delegates_below_threshold() {
        let g = g2_augmented();
        let sp = initial_strategy(&g).unwrap();
        // Tiny game: the gate must pick the sequential path, which is the
        // exactness contract anyway.
        let via_gate = compute_valuation_parallel(&g, &sp, 8, 0);
        assert_eq!(via_gate, compute_valuation_seq(&g, &sp));
    }

    #[test]
    fn from_parts_rejects_broken_structure() {
        let domain = Priorities::from_values([0u32]);
        let err = EulerList::from_parts(domain.clone(), vec![0], vec![5, END], 0).unwrap_err();
        assert_eq!(err, ListStructureError::SuccessorOutOfRange(0, 5));
        let err = EulerList::from_parts(domain.clone(), vec![0], vec![1, 1], 0).unwrap_err();
        assert_eq!(err, ListStructureError::MultiplePredecessors(1));
        let err = EulerList::from_parts(domain, vec![0, 0], vec![END; 4], 9).unwrap_err();
        assert_eq!(err, ListStructureError::HeadOutOfRange(9));
    }
}
