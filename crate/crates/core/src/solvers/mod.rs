//! The inertial projection method with Armijo line search, the two
//! extragradient baselines, and the driver loop that runs them.

mod alg1;
mod baselines;
mod driver;
pub mod invariants;

use serde::{Deserialize, Serialize};

use crate::vector::DenseVector;

pub use alg1::{line_search, residual, step_alg1, Alg1Iterate, Alg1Step, LineSearchOutcome, Residual};
pub use baselines::{isem_step_bound, step_isem, step_sem, SemStep};
pub use driver::solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Inertial projection method with Armijo line search.
    Alg1,
    /// Same method with α_n ≡ 0.
    #[serde(rename = "alg1_noinertia")]
    Alg1NoInertia,
    /// Subgradient extragradient method with fixed step λ.
    Sem,
    /// Inertial subgradient extragradient method with fixed step λ.
    Isem,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Alg1, Method::Alg1NoInertia, Method::Sem, Method::Isem];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Alg1 => "alg1",
            Method::Alg1NoInertia => "alg1_noinertia",
            Method::Sem => "sem",
            Method::Isem => "isem",
        }
    }

    pub fn uses_line_search(&self) -> bool {
        matches!(self, Method::Alg1 | Method::Alg1NoInertia)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A reference solution, when one is known analytically.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnownSolutionInfo {
    pub x_star: Option<DenseVector>,
    pub unique: bool,
}

impl KnownSolutionInfo {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn unique(x_star: DenseVector) -> Self {
        Self {
            x_star: Some(x_star),
            unique: true,
        }
    }
}

/// The two most recent iterates `x_{n−1}`, `x_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub n: u64,
    pub x_prev: DenseVector,
    pub x_curr: DenseVector,
}

impl SolverState {
    /// `x_0 = x_1 = start`, `n = 1`.
    pub fn start(x1: DenseVector) -> Self {
        Self {
            n: 1,
            x_prev: x1.clone(),
            x_curr: x1,
        }
    }

    /// Inertial extrapolation `w = x_n + α(x_n − x_{n−1})`. Returns `x_n` untouched when `α = 0`.
    pub fn extrapolate(&self, alpha: f64) -> crate::Result<DenseVector> {
        if alpha == 0.0 {
            return Ok(self.x_curr.clone());
        }
        self.x_curr.add_scaled(alpha, &self.x_curr.sub(&self.x_prev)?)
    }

    pub fn advance(&self, x_next: DenseVector) -> Self {
        Self {
            n: self.n + 1,
            x_prev: self.x_curr.clone(),
            x_curr: x_next,
        }
    }
}
