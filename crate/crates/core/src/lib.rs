//! Tabu search for parametric engineering design.
//!
//! The [`search`] engine works on any [`problem::ProblemDefinition`]: a
//! quantized box of design variables plus a model returning an objective and
//! constraint violations. Two benchmark families ship with it: a ten-bar
//! truss whose member areas and free node positions are sized for minimum
//! mass ([`truss`]), and a pair of shaped magnet poles tuned for a uniform
//! gap field ([`pole`]). [`harness`] runs seeded batches of either from the
//! command line and writes result and convergence files.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod harness;
pub mod pole;
pub mod problem;
pub mod problems;
pub mod search;
pub mod truss;

pub use problem::{
    evaluate, EvaluationRecord, Grid, PenaltyConfig, ProblemDefinition, SolutionVector,
    INFEASIBLE_SENTINEL,
};
pub use search::{run_search, Phase, SearchConfig, SearchError, SearchOutcome};
