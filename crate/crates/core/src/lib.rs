//! Inertial projection method for monotone variational inequalities, with
//! extragradient baselines, projectors and benchmark problem generators.
//!
//! Find `x* ∈ C` with `⟨F(x*), y − x*⟩ ≥ 0` for all `y ∈ C`, where `F` is
//! monotone and continuous but not necessarily Lipschitz.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod grid;
pub mod matrix;
pub mod operators;
pub mod problems;
pub mod sets;
pub mod solvers;
pub mod trace;
pub mod vector;

pub use config::{AlphaSchedule, CheckMode, CutMode, SolverConfig, StopRule};
pub use error::{Error, Result};
pub use grid::UniformGrid;
pub use matrix::Matrix;
pub use operators::OperatorSpec;
pub use problems::ProblemInstance;
pub use sets::FeasibleSet;
pub use solvers::{solve, KnownSolutionInfo, Method, SolverState};
pub use trace::{InvariantTally, IterationRecord, RunStatus, RunTrace};
pub use vector::DenseVector;
