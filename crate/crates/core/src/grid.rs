use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on (0, 1] with nodes `t_i = i/n`, `i = 1..=n`.
///
/// Grid functions are stored as vectors of nodal values. The left endpoint is
/// omitted: every integrand used here (`∫₀ᵗ x`, `∫ t·x`) is anchored there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformGrid {
    n: usize,
}

impl UniformGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("grid size must be >= 2, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        (i + 1) as f64 / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Right-endpoint quadrature weights of `∫₀¹ t·x(t) dt`, i.e. `h·t_i`.
    pub fn moment_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        self.nodes().into_iter().map(|t| h * t).collect()
    }
}
