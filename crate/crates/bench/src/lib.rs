//! Experiment harness for the inertial-vi solvers: JSON configs, parallel
//! sweeps, CSV traces and summary tables.

pub mod builtin;
pub mod config;
pub mod error;
pub mod report;
pub mod runner;

pub use config::{parse_config, ExperimentConfig, MethodEntry, ProblemSpec, SolverOverrides};
pub use error::BenchError;
pub use report::{emit_plot_csv, emit_trace_csv, render_table, summarize, RunOutcome, Stats, SummaryRow};
pub use runner::{run_experiment, ExperimentReport};
