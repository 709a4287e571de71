//! Games on graphs with continuous, positionally determined payoffs built
//! from contracting bases of piecewise-linear maps.
//!
//! - [`words`]: letters, finite words and lassos `u(v)^ω`.
//! - [`payoff`]: contracting bases, multi-discounted payoffs, the canonical metric.
//! - [`graph`]: arenas, positional strategies, plays, counterexample builders.
//! - [`solver`]: value iteration, strategy improvement, brute force, verification.
//! - [`analysis`]: property checkers, the ψ-transform, the multi-discounted detector.
//! - [`io`]: JSON formats.
//! - [`instances`]: random generators.

// `!(x > 0.0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod graph;
pub mod instances;
pub mod io;
pub mod payoff;
pub mod solver;
pub mod words;
