//! Pattern-free subsets of the grid `[n]^d`.
//!
//! The crate enumerates non-trivial copies `b + r·X` of a finite pattern,
//! computes the extremal function `r_X(n)` and the number of X-free sets
//! exactly at small scale, builds Behrend-type X-free sets in any
//! dimension, audits the supersaturation inequalities on concrete sets,
//! and evaluates the hypergraph-container parameter schedule.

// `!(x > 0.0)` rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod behrend;
pub mod cache;
pub mod cli;
pub mod container;
pub mod copies;
pub mod error;
pub mod grid;
pub mod pattern;
pub mod primes;
pub mod provider;
pub mod solver;
pub mod supersat;

pub use copies::{
    codegree_stats, count_copies_closed_form, enumerate_copies, gamma_count, is_x_free,
    CopyPlacement, HypergraphSummary,
};
pub use error::{Error, Result};
pub use grid::GridSet;
pub use pattern::{normalize, parse_pattern, pattern_hash, triple_to_primitive, Pattern, Rational, RationalTriple};
pub use solver::{
    count_xfree_subsets, greedy_lower_bound, solve_rx_exact, verify_witness, CountRecord,
    Provenance, RNumberRecord,
};
