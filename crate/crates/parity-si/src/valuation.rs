//! The valuation algebra: per-priority count vectors, the absorbing top
//! element, and the order that decides comparisons at the highest differing
//! priority.
//!
//! A finite valuation counts how many vertices of each priority lie on a path
//! to the sink. Two finite valuations are compared at the largest priority
//! where they differ: more of an even priority is better for Even, more of an
//! odd priority is worse. `Top` stands for plays that never reach the sink
//! and dominates every finite valuation.

use std::cmp::Ordering;
use std::fmt::Write as _;

use thiserror::Error;

/// Error returned when a priority is not part of the domain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("priority {0} is not used by the game")]
pub struct UnknownPriority(pub u32);

/// Sign of a unit valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Pos,
    Neg,
}

/// The sorted set of priorities used by a game.
///
/// Finite valuations are dense vectors indexed by the rank of a priority in
/// this set. Games tend to use only a handful of distinct priorities, so the
/// dense form is compact and cheap to compare.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Priorities {
    sorted: Vec<u32>,
}

impl Priorities {
    pub fn from_values(values: impl IntoIterator<Item = u32>) -> Self {
        let mut sorted: Vec<u32> = values.into_iter().collect();
        sorted.sort_unstable();
        sorted.dedup();
        Priorities { sorted }
    }

    /// Number of distinct priorities.
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.sorted
    }

    /// Index of `priority` in the sorted domain, if present.
    pub fn rank_of(&self, priority: u32) -> Option<usize> {
        self.sorted.binary_search(&priority).ok()
    }

    pub fn priority_at(&self, rank: usize) -> u32 {
        self.sorted[rank]
    }

    /// The all-zero valuation (the valuation of the empty path).
    pub fn zero(&self) -> Valuation {
        Valuation::Finite(vec![0; self.sorted.len()])
    }

    /// A vector with a single `+1` or `-1` entry at `priority`.
    pub fn unit(&self, priority: u32, sign: Sign) -> Result<Valuation, UnknownPriority> {
        let rank = self.rank_of(priority).ok_or(UnknownPriority(priority))?;
        let mut counts = vec![0; self.sorted.len()];
        counts[rank] = match sign {
            Sign::Pos => 1,
            Sign::Neg => -1,
        };
        Ok(Valuation::Finite(counts))
    }

    /// Total order on valuations. `Top` is the unique maximum; finite
    /// valuations are decided at the largest priority where they differ.
    ///
    /// Panics if the operands live over different priority domains.
    pub fn compare(&self, a: &Valuation, b: &Valuation) -> Ordering {
        match (a, b) {
            (Valuation::Top, Valuation::Top) => Ordering::Equal,
            (Valuation::Top, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Finite(_), Valuation::Top) => Ordering::Less,
            (Valuation::Finite(x), Valuation::Finite(y)) => self.compare_counts(x, y),
        }
    }

    /// Pointwise sum. `Top` absorbs: the value iteration in the Bellman-Ford
    /// best response adds unit vectors to possibly-unreachable successors.
    ///
    /// Panics if the operands live over different priority domains.
    pub fn add(&self, a: &Valuation, b: &Valuation) -> Valuation {
        match (a, b) {
            (Valuation::Top, _) | (_, Valuation::Top) => Valuation::Top,
            (Valuation::Finite(x), Valuation::Finite(y)) => {
                assert_eq!(x.len(), y.len(), "valuations over different domains");
                Valuation::Finite(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
        }
    }

    /// Decide two finite count vectors at the highest differing rank.
    pub fn compare_counts(&self, a: &[i64], b: &[i64]) -> Ordering {
        assert_eq!(a.len(), self.sorted.len(), "valuation over a different domain");
        assert_eq!(b.len(), self.sorted.len(), "valuation over a different domain");
        for rank in (0..a.len()).rev() {
            if a[rank] != b[rank] {
                let even = self.sorted[rank].is_multiple_of(2);
                // More of an even priority is better, more of an odd one is worse.
                return if (a[rank] < b[rank]) == even {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }

    /// Rendering for logs and test goldens: `{p1:c1, p2:c2}` or `TOP`.
    pub fn render(&self, v: &Valuation) -> String {
        match v {
            Valuation::Top => "TOP".to_string(),
            Valuation::Finite(counts) => {
                let mut out = String::from("{");
                for (rank, count) in counts.iter().enumerate() {
                    if rank > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{}:{}", self.sorted[rank], count);
                }
                out.push('}');
                out
            }
        }
    }
}

/// A valuation: either the absorbing top element or a count per priority.
///
/// Counts of play valuations are non-negative; intermediate prefix values in
/// the list-ranking pipeline may be negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Valuation {
    Top,
    Finite(Vec<i64>),
}

impl Valuation {
    pub fn is_top(&self) -> bool {
        matches!(self, Valuation::Top)
    }

    pub fn counts(&self) -> Option<&[i64]> {
        match self {
            Valuation::Top => None,
            Valuation::Finite(c) => Some(c),
        }
    }
}

/// Per-vertex valuations in one flat buffer.
///
/// Entries marked top keep whatever counts they last held; all comparisons
/// and equality checks ignore the counts of top entries.
#[derive(Debug, Clone)]
pub struct ValuationTable {
    dim: usize,
    top: Vec<bool>,
    counts: Vec<i64>,
}

impl ValuationTable {
    pub fn new_all_top(len: usize, dim: usize) -> Self {
        ValuationTable {
            dim,
            top: vec![true; len],
            counts: vec![0; len * dim],
        }
    }

    pub fn len(&self) -> usize {
        self.top.len()
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_top(&self, v: u32) -> bool {
        self.top[v as usize]
    }

    pub fn counts(&self, v: u32) -> &[i64] {
        let i = v as usize * self.dim;
        &self.counts[i..i + self.dim]
    }

    pub fn set_top(&mut self, v: u32) {
        self.top[v as usize] = true;
    }

    pub fn set_zero(&mut self, v: u32) {
        self.top[v as usize] = false;
        let i = v as usize * self.dim;
        self.counts[i..i + self.dim].fill(0);
    }

    pub fn set_finite(&mut self, v: u32, counts: &[i64]) {
        assert_eq!(counts.len(), self.dim);
        self.top[v as usize] = false;
        let i = v as usize * self.dim;
        self.counts[i..i + self.dim].copy_from_slice(counts);
    }

    /// `dst := src` within the same table.
    pub fn copy_entry(&mut self, dst: u32, src: u32) {
        self.top[dst as usize] = self.top[src as usize];
        let d = self.dim;
        self.counts
            .copy_within(src as usize * d..src as usize * d + d, dst as usize * d);
    }

    /// Add one occurrence of the priority at `rank`. A priority outside the
    /// domain (`None`) contributes nothing.
    pub fn bump(&mut self, v: u32, rank: Option<usize>) {
        if let Some(r) = rank {
            if !self.top[v as usize] {
                self.counts[v as usize * self.dim + r] += 1;
            }
        }
    }

    /// `dst := src_table[src] ⊕ A_rank`, with top absorbing.
    pub fn assign_add_unit(&mut self, dst: u32, src_table: &ValuationTable, src: u32, rank: Option<usize>) {
        if src_table.is_top(src) {
            self.set_top(dst);
        } else {
            self.set_finite(dst, src_table.counts(src));
            self.bump(dst, rank);
        }
    }

    pub fn get(&self, v: u32) -> Valuation {
        if self.is_top(v) {
            Valuation::Top
        } else {
            Valuation::Finite(self.counts(v).to_vec())
        }
    }

    /// Compare the valuations of two vertices of this table.
    pub fn compare_vertices(&self, domain: &Priorities, a: u32, b: u32) -> Ordering {
        self.compare_across(domain, a, self, b)
    }

    /// Compare entry `a` of this table against entry `b` of `other`.
    pub fn compare_across(&self, domain: &Priorities, a: u32, other: &ValuationTable, b: u32) -> Ordering {
        match (self.is_top(a), other.is_top(b)) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => domain.compare_counts(self.counts(a), other.counts(b)),
        }
    }

    pub fn entries_equal(&self, a: u32, other: &ValuationTable, b: u32) -> bool {
        match (self.is_top(a), other.is_top(b)) {
            (true, true) => true,
            (false, false) => self.counts(a) == other.counts(b),
            _ => false,
        }
    }
}

impl PartialEq for ValuationTable {
    fn eq(&self, other: &Self) -> bool {
        if self.dim != other.dim || self.top.len() != other.top.len() {
            return false;
        }
        (0..self.top.len() as u32).all(|v| self.entries_equal(v, other, v))
    }
}

impl Eq for ValuationTable {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dom(values: &[u32]) -> Priorities {
        Priorities::from_values(values.iter().copied())
    }

    fn fin(counts: &[i64]) -> Valuation {
        Valuation::Finite(counts.to_vec())
    }

    #[test]
    fn finite_below_top() {
        let d = dom(&[1, 2, 4]);
        assert_eq!(d.compare(&fin(&[5, 5, 5]), &Valuation::Top), Ordering::Less);
        assert_eq!(d.compare(&Valuation::Top, &Valuation::Top), Ordering::Equal);
    }

    #[test]
    fn maxdiff_even_priority() {
        // {2:1, 4:0} vs {2:0, 4:1}: they differ at 4 (even), 0 < 1.
        let d = dom(&[2, 4]);
        assert_eq!(d.compare(&fin(&[1, 0]), &fin(&[0, 1])), Ordering::Less);
    }

    #[test]
    fn maxdiff_odd_priority() {
        // {1:2, 2:1} vs {1:0, 2:1}: they differ at 1 (odd), 2 > 0 is worse.
        let d = dom(&[1, 2]);
        assert_eq!(d.compare(&fin(&[2, 1]), &fin(&[0, 1])), Ordering::Less);
    }

    #[test]
    fn add_pointwise_and_absorbing() {
        let d = dom(&[1, 4]);
        assert_eq!(d.add(&fin(&[1, 0]), &fin(&[2, 1])), fin(&[3, 1]));
        assert_eq!(d.add(&fin(&[2, 1]), &d.zero()), fin(&[2, 1]));
        assert_eq!(d.add(&fin(&[2, 1]), &Valuation::Top), Valuation::Top);
    }

    #[test]
    fn unit_vectors() {
        let d = dom(&[1, 2, 4]);
        assert_eq!(d.unit(2, Sign::Pos).unwrap(), fin(&[0, 1, 0]));
        assert_eq!(d.unit(2, Sign::Neg).unwrap(), fin(&[0, -1, 0]));
        assert_eq!(d.unit(3, Sign::Pos), Err(UnknownPriority(3)));
    }

    #[test]
    fn render_forms() {
        let d = dom(&[1, 2]);
        assert_eq!(d.render(&Valuation::Top), "TOP");
        assert_eq!(d.render(&fin(&[3, -1])), "{1:3, 2:-1}");
    }

    #[test]
    fn table_equality_ignores_top_counts() {
        let d = 2;
        let mut a = ValuationTable::new_all_top(2, d);
        let mut b = ValuationTable::new_all_top(2, d);
        a.set_finite(0, &[1, 2]);
        b.set_finite(0, &[1, 2]);
        // Entry 1 stays top in both; scribble different counts underneath.
        a.set_finite(1, &[9, 9]);
        a.set_top(1);
        assert_eq!(a, b);
        b.set_finite(1, &[1, 1]);
        assert_ne!(a, b);
    }

    /// A random domain together with `k` random finite valuations over it.
    fn domain_with(k: usize) -> impl Strategy<Value = (Priorities, Vec<Valuation>)> {
        prop::collection::btree_set(0u32..12, 1..5).prop_flat_map(move |set| {
            let domain = Priorities::from_values(set);
            let dim = domain.len();
            prop::collection::vec(prop::collection::vec(-6i64..7, dim), k)
                .prop_map(move |vs| (domain.clone(), vs.into_iter().map(Valuation::Finite).collect()))
        })
    }

    proptest! {
        #[test]
        fn compare_is_antisymmetric((d, vs) in domain_with(2)) {
            prop_assert_eq!(d.compare(&vs[0], &vs[1]), d.compare(&vs[1], &vs[0]).reverse());
        }

        #[test]
        fn compare_is_transitive_total((d, mut vs) in domain_with(3)) {
            vs.push(Valuation::Top);
            vs.sort_by(|a, b| d.compare(a, b));
            // Sorted order is consistent pairwise, i.e. the order is total.
            for i in 0..vs.len() {
                for j in i..vs.len() {
                    prop_assert_ne!(d.compare(&vs[i], &vs[j]), Ordering::Greater);
                }
            }
        }

        #[test]
        fn add_is_assoc_comm_with_zero((d, vs) in domain_with(3)) {
            let (a, b, c) = (&vs[0], &vs[1], &vs[2]);
            prop_assert_eq!(d.add(a, b), d.add(b, a));
            prop_assert_eq!(d.add(&d.add(a, b), c), d.add(a, &d.add(b, c)));
            prop_assert_eq!(&d.add(a, &d.zero()), a);
        }

        #[test]
        fn compare_shift_invariant((d, vs) in domain_with(3)) {
            let (a, b, c) = (&vs[0], &vs[1], &vs[2]);
            // Shifting both sides by a common vector preserves the order; this
            // is what makes successor-based comparison of plays sound.
            prop_assert_eq!(d.compare(a, b), d.compare(&d.add(a, c), &d.add(b, c)));
        }
    }
}
