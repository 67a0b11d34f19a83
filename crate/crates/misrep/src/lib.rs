//! Exact-rational analysis of seat allocation in two-party, single-member-district
//! elections.
//!
//! Everything is built around one objective: a state has `N` districts, Party A
//! holds vote share `p_d` in district `d`, and awarding A the district set `x`
//! costs
//!
//! ```text
//! Phi(x; w) = Dist(x) + w * Agg(x)
//! ```
//!
//! where `Dist` counts the mass of voters represented by the party they voted
//! against, and `Agg = |a - S|` measures how far the awarded seat total `S`
//! strays from the proportional target `a = N * mean share`. Sweeping the
//! weight `w` from `0` to infinity traces a family of rules from
//! first-past-the-post to (rounded) proportional representation.
//!
//! The crate computes, with exact rational arithmetic throughout:
//!
//! - optimal allocations, the weight intervals on which each seat total is
//!   optimal, and the seat schedule / cutoff curve in `w` ([`optimizer`]);
//! - concrete rule objects and counterexamples showing which axioms the
//!   family satisfies at which weights ([`rules`]);
//! - the feasible `(Dist, Agg)` set and its Pareto frontier ([`frontier`]);
//! - majorization ("geographic concentration") comparative statics
//!   ([`majorization`]);
//! - minimal mean-preserving gerrymandering costs ([`gerrymander`]);
//! - an election-results cleaning pipeline that inverts observed outcomes
//!   into implied weights ([`empirics`]).
//!
//! Rationals never leave the crate as floats: parsing, computation, and
//! serialization all preserve exactness so that interval endpoints and
//! breakpoints compare bit-for-bit.

pub mod error;
pub mod ratio;

pub mod model;

pub mod optimizer;

pub mod rules;

pub mod frontier;

pub mod majorization;

pub mod gerrymander;

pub mod empirics;

pub use error::Error;
pub use model::{Allocation, PhiValue, Profile, Rational, Share, Weight};
