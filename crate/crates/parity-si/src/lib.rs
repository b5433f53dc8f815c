//! A parity game solver built around greedy all-switches strategy improvement
//! with path-count valuations.
//!
//! The improver is always player Even. Each iteration computes Odd's best
//! response, either by one-player strategy improvement (optionally warm-started
//! with the previous response) or by a Bellman-Ford style value iteration.
//! Valuations of a fixed strategy pair are computed sequentially by walking
//! the strategy tree backwards from the sink, or in parallel by linearizing
//! the tree with an Euler tour and ranking the resulting linked list with a
//! splitter-based scheme.
//!
//! The [`oracle`] module carries independent correctness machinery: a
//! recursive solver, a solution verifier, and a seeded random game generator.

pub mod best_response;
pub mod cli;
pub mod euler_rank;
pub mod game;
pub mod oracle;
pub mod si_engine;
pub mod valuation;
