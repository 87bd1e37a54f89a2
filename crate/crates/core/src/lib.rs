//! Exact and Monte Carlo tools for exchangeable and multi-exchangeable
//! systems on finite alphabets.
//!
//! The crate is layered:
//!
//! * [`measures`]: exact rational probability measures on tuples.
//! * [`combinatorics`]: sampling laws with and without replacement, their
//!   collision decomposition and total-variation gap bounds.
//! * [`sampling`]: seeded samplers whose laws match the exact layer.
//! * [`multiclass`]: multi-class systems, measure vectors, conditional
//!   resampling given the measure vector and its exact verification.
//! * [`convergence`]: moment batteries comparing a family of systems with its
//!   limit, both through the systems and through their measure vectors.
//! * [`report`] and [`cli`]: reproducible JSON/CSV reports and the runner
//!   behind the `exchkit` binary.

pub mod cli;
pub mod combinatorics;
pub mod convergence;
pub mod measures;
pub mod multiclass;
pub mod rational;
pub mod report;
pub mod sampling;
pub mod stats;

/// Largest number of index tuples (`N^k`, or outcomes of a joint law) any
/// exact routine will enumerate.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

pub use measures::{tensor_power, tuple, tv_distance, Atom, DiscreteMeasure, IndexPattern};
pub use rational::Rational;
