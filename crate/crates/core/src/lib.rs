//! Exact routing solvers for federated-learning model distribution and
//! collection over time-varying satellite constellations.
//!
//! The crate is organized around a snapshot-indexed digraph
//! ([`tvg::TimeVaryingGraph`]); on top of it sit an exact flow engine
//! ([`flow`], [`lp`]), a min-cost arborescence solver ([`arborescence`]),
//! the polynomial and exhaustive routing solvers ([`download`], [`upload`]),
//! independent brute-force oracles ([`oracle`]), hardness gadget builders with
//! an equivalence harness ([`reduction`]), and the wire format, generators and
//! CLI support types ([`wire`], [`generate`], [`segment`]).
//!
//! All quantities are exact rationals; nothing in the crate uses floating
//! point, so feasibility verdicts at capacity boundaries are never ambiguous.

#![forbid(unsafe_code)]

pub mod arborescence;
pub mod flow;
pub mod instance;
pub mod limits;
pub mod lp;
pub mod rational;
pub mod reduction;
pub mod solution;
pub mod tvg;
pub mod validate;

pub use instance::{Phase, RoutingInstance, Variant};
pub use rational::Rational;
pub use solution::Solution;
