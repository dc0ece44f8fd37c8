use thiserror::Error;

/// Errors raised by the numeric primitives, projectors and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("halfspace normal is zero")]
    ZeroNormal,

    #[error("polyhedron projection did not converge after {sweeps} sweeps (infeasibility {infeasibility:.3e})")]
    ProjectionNotConverged { sweeps: usize, infeasibility: f64 },

    #[error("line search found no admissible step within {cap} backtracking trials")]
    LineSearchFailure { cap: u32 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
