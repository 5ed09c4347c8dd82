//! Approximate Frank-Wolfe methods for least-squares problems whose
//! feasible set is the convex hull of norm-bounded vectors with
//! graph-structured supports.
//!
//! The crate provides the graph and constraint models, the least-squares
//! objective with a synthetic instance generator, dual maximization oracles
//! (exact, Top-g+ visiting and its randomized multi-candidate variant), the
//! FW-type solver with open-loop, backtracking and Demyanov-Rubinov steps,
//! and projected-gradient baselines.

pub mod baselines;
pub mod dmo;
pub mod error;
pub mod graph;
pub mod instance;
pub mod linalg;
pub mod model;
pub mod objective;
pub mod rng;
pub mod solver;
pub mod support;
pub mod trace;

pub use baselines::{best_pgd, random_pgd, PgdConfig, PgdStep};
pub use dmo::{DmoParams, DmoResult, DmoSelection, DmoVariant};
pub use error::{GscoError, Result};
pub use graph::Graph;
pub use model::{ConstraintModel, ModelVariant};
pub use objective::{generate_instance, Instance, InstanceSpec, LeastSquaresObjective};
pub use solver::{solve, FwVariant, SolveOutput, SolverConfig, StepRule, UpdateOption};
pub use support::SupportSet;
pub use trace::{IterationRecord, IterationTrace, Termination};
