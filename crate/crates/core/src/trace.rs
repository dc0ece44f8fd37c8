//! Per-iteration records and run outcomes.

use serde::{Deserialize, Serialize};

use crate::vector::DenseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub n: u64,
    /// ‖x_{n+1} − x_n‖
    pub step_diff: f64,
    /// ‖w_n − z_n‖ for the inertial projection method, ‖w_n − y_n‖ for the baselines.
    pub residual: f64,
    /// η_n = γ^{m_n}; the fixed step λ for the baselines.
    pub eta: f64,
    pub ls_trials: u32,
    /// Γ_n, present when a reference solution is known.
    pub gamma_n: Option<f64>,
    /// Seconds since the solve loop started.
    pub elapsed: f64,
    /// ‖x_{n+1}‖
    pub norm_next: f64,
    /// ‖x_{n+1} − w_n‖
    pub cut_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    ExactSolutionFound,
    MaxIter,
    LineSearchFailure,
    ProjectionFailure,
}

impl RunStatus {
    /// Whether the run ended at an (approximate) solution.
    pub fn is_success(&self) -> bool {
        matches!(self, RunStatus::Converged | RunStatus::ExactSolutionFound)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::ExactSolutionFound => "exact_solution_found",
            RunStatus::MaxIter => "max_iter",
            RunStatus::LineSearchFailure => "line_search_failure",
            RunStatus::ProjectionFailure => "projection_failure",
        }
    }
}

impl std::fmt::Display for RunStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Violation counts of the runtime-checked inequalities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantTally {
    /// Iterations on which the checks ran.
    pub checked: u64,
    /// Armijo inequality fails at m_n, or holds at m_n − 1.
    pub line_search_minimality: u64,
    /// h_n(w_n) < (σ η_n / 2) ‖w_n − z_n‖²
    pub cut_lower_bound: u64,
    /// h_n(x*) > 0
    pub separation: u64,
    /// ‖x_{n+1} − x*‖² > ‖w_n − x*‖² − ‖x_{n+1} − w_n‖²
    pub fejer: u64,
    /// Γ_{n+1} − Γ_n > −(1 − 3α) ‖x_{n+1} − x_n‖²
    pub gamma_descent: u64,
}

impl InvariantTally {
    pub fn violations(&self) -> u64 {
        self.line_search_minimality
            + self.cut_lower_bound
            + self.separation
            + self.fejer
            + self.gamma_descent
    }

    pub fn merge(&mut self, other: &InvariantTally) {
        self.checked += other.checked;
        self.line_search_minimality += other.line_search_minimality;
        self.cut_lower_bound += other.cut_lower_bound;
        self.separation += other.separation;
        self.fejer += other.fejer;
        self.gamma_descent += other.gamma_descent;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
    pub status: RunStatus,
    pub final_point: DenseVector,
    /// Iteration index at which the run stopped.
    pub stopped_at: u64,
    pub invariants: InvariantTally,
    pub diagnostic: Option<String>,
    /// Wall-clock seconds spent in the solve loop (0 when timing is disabled).
    pub elapsed: f64,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }
}
