//! Solver parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rule producing the inertial weight α_n for iteration n (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AlphaSchedule {
    Constant { value: f64 },
    /// Linear ramp from `start` at n = 1 to `cap` at n = 1 + `ramp_iters`, constant afterwards.
    Ramp { start: f64, cap: f64, ramp_iters: u64 },
}

impl AlphaSchedule {
    pub const fn constant(value: f64) -> Self {
        AlphaSchedule::Constant { value }
    }

    pub fn at(&self, n: u64) -> f64 {
        match *self {
            AlphaSchedule::Constant { value } => value,
            AlphaSchedule::Ramp {
                start,
                cap,
                ramp_iters,
            } => {
                if ramp_iters == 0 {
                    return cap;
                }
                let frac = (n.saturating_sub(1) as f64 / ramp_iters as f64).min(1.0);
                start + (cap - start) * frac
            }
        }
    }

    /// Least upper bound of the schedule.
    pub fn sup(&self) -> f64 {
        match *self {
            AlphaSchedule::Constant { value } => value,
            AlphaSchedule::Ramp { start, cap, .. } => start.max(cap),
        }
    }

    /// Checks `0 ≤ α_n ≤ α_{n+1} ≤ sup < 1`.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = match *self {
            AlphaSchedule::Constant { value } => (value, value),
            AlphaSchedule::Ramp { start, cap, .. } => (start, cap),
        };
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "inertial weights must lie in [0, 1), got {lo}..{hi}"
            )));
        }
        if hi < lo {
            return Err(Error::InvalidParameter(format!(
                "inertial schedule must be nondecreasing, got ramp {lo} -> {hi}"
            )));
        }
        Ok(())
    }
}

impl Default for AlphaSchedule {
    fn default() -> Self {
        AlphaSchedule::constant(0.2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// ‖x_{n+1} − x_n‖ ≤ tol
    StepDiff,
    /// ‖x_{n+1}‖ ≤ tol
    NormToZero,
    /// ‖w_n − z_n‖ ≤ tol
    Residual,
}

/// How often the per-iteration invariants are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// Every iteration.
    #[default]
    Checked,
    /// Every 10th iteration.
    Fast,
}

impl CheckMode {
    pub fn due(&self, n: u64) -> bool {
        match self {
            CheckMode::Checked => true,
            CheckMode::Fast => n.is_multiple_of(10),
        }
    }
}

/// Which halfspace the inertial projection method projects onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutMode {
    /// Project onto `C ∩ C_n` when `C` is affine (closed form, keeps iterates in `C`),
    /// onto `C_n` otherwise.
    #[default]
    Auto,
    /// Always project onto the ambient halfspace `C_n`.
    Ambient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Backtracking base γ ∈ (0, 1).
    pub gamma: f64,
    /// Sufficient-progress constant σ ∈ (0, 1) of the line search.
    pub sigma_ls: f64,
    pub alpha: AlphaSchedule,
    /// Fixed step for the extragradient baselines; `None` means `0.1 / L`.
    pub lambda: Option<f64>,
    /// Slack δ in the inertial-extragradient step-size bound.
    pub isem_delta: f64,
    pub max_iter: u64,
    pub tol: f64,
    pub stop_rule: StopRule,
    pub max_ls_exponent: u32,
    pub check_mode: CheckMode,
    pub cut_mode: CutMode,
    /// When false every elapsed time is recorded as 0 so traces are reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gamma: 0.8,
            sigma_ls: 0.5,
            alpha: AlphaSchedule::default(),
            lambda: None,
            isem_delta: 0.04,
            max_iter: 100_000,
            tol: 1e-3,
            stop_rule: StopRule::NormToZero,
            max_ls_exponent: 60,
            check_mode: CheckMode::Checked,
            cut_mode: CutMode::Auto,
            record_timing: true,
        }
    }
}

impl SolverConfig {
    /// Method-independent range checks.
    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        open_unit("gamma", self.gamma)?;
        open_unit("sigma_ls", self.sigma_ls)?;
        self.alpha.validate()?;
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidParameter(format!("lambda must be positive, got {l}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_ls_exponent == 0 {
            return Err(Error::InvalidParameter("max_ls_exponent must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_is_nondecreasing_and_capped() {
        let s = AlphaSchedule::Ramp {
            start: 0.0,
            cap: 0.3,
            ramp_iters: 10,
        };
        assert_eq!(s.at(1), 0.0);
        assert!((s.at(6) - 0.15).abs() < 1e-15);
        assert_eq!(s.at(11), 0.3);
        assert_eq!(s.at(1000), 0.3);
        let vals: Vec<f64> = (1..30).map(|n| s.at(n)).collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(s.sup(), 0.3);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        let mut cfg = SolverConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.gamma = 1.0;
        assert!(cfg.validate().is_err());
        cfg.gamma = 0.5;
        cfg.alpha = AlphaSchedule::Ramp {
            start: 0.3,
            cap: 0.1,
            ramp_iters: 5,
        };
        assert!(cfg.validate().is_err());
        cfg.alpha = AlphaSchedule::default();
        cfg.lambda = Some(-1.0);
        assert!(cfg.validate().is_err());
    }
}
