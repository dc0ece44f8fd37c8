use crate::config::{CutMode, SolverConfig};
use crate::error::{check_dim, Error, Result};
use crate::operators::OperatorSpec;
use crate::sets::{project_halfspace, FeasibleSet};
use crate::vector::DenseVector;

use super::SolverState;

/// `r(x) = x − P_C(x − F(x))` together with `z = P_C(x − F(x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub r: DenseVector,
    pub z: DenseVector,
    pub fx: DenseVector,
}

pub fn residual(op: &OperatorSpec, set: &FeasibleSet, x: &DenseVector) -> Result<Residual> {
    check_dim(op.dim(), set.dim())?;
    let fx = op.eval(x)?;
    if !fx.is_finite() {
        return Err(Error::NonFinite {
            context: "operator evaluation",
        });
    }
    let z = set.project(&x.sub(&fx)?)?.point;
    let r = x.sub(&z)?;
    Ok(Residual { r, z, fx })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    /// Smallest nonnegative `m` accepted.
    pub m: u32,
    /// `γ^m`
    pub eta: f64,
    /// `w − γ^m r`
    pub y: DenseVector,
    /// `F(y)`
    pub fy: DenseVector,
}

/// Whether `⟨F(y), r⟩ ≥ (σ/2) ‖r‖²`.
pub(crate) fn armijo_holds(fy: &DenseVector, r: &DenseVector, sigma: f64) -> Result<bool> {
    Ok(fy.inner_product(r)? >= 0.5 * sigma * r.norm_squared())
}

/// Backtracks `m = 0, 1, …, cap` until `y = w − γ^m r` satisfies
/// `⟨F(y), r⟩ ≥ (σ/2) ‖r‖²`.
pub fn line_search(
    op: &OperatorSpec,
    w: &DenseVector,
    r: &DenseVector,
    gamma: f64,
    sigma: f64,
    cap: u32,
) -> Result<LineSearchOutcome> {
    check_dim(w.dim(), r.dim())?;
    if !(gamma > 0.0 && gamma < 1.0 && sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "line search needs gamma, sigma in (0, 1), got {gamma}, {sigma}"
        )));
    }
    if r.norm() == 0.0 {
        return Err(Error::InvalidParameter("line search called with zero residual".into()));
    }
    for m in 0..=cap {
        let eta = gamma.powi(m as i32);
        let y = w.add_scaled(-eta, r)?;
        let fy = op.eval(&y)?;
        if !fy.is_finite() {
            return Err(Error::NonFinite {
                context: "line search evaluation",
            });
        }
        if armijo_holds(&fy, r, sigma)? {
            return Ok(LineSearchOutcome { m, eta, y, fy });
        }
    }
    Err(Error::LineSearchFailure { cap })
}

/// Everything computed during one advancing iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Alg1Iterate {
    pub n: u64,
    pub alpha: f64,
    pub w: DenseVector,
    pub z: DenseVector,
    /// `w − z`
    pub r: DenseVector,
    pub line_search: LineSearchOutcome,
    /// Normal of the halfspace actually projected onto: `F(y)`, or its
    /// tangential part when cutting within an affine `C`.
    pub cut_normal: DenseVector,
    pub x_next: DenseVector,
}

impl Alg1Iterate {
    /// `h_n(x) = ⟨F(y_n), x − y_n⟩`
    pub fn cut_value(&self, x: &DenseVector) -> Result<f64> {
        self.line_search.fy.inner_product(&x.sub(&self.line_search.y)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Alg1Step {
    Advanced {
        iterate: Box<Alg1Iterate>,
        next: SolverState,
    },
    /// `r(w_n) = 0` (point is `w_n`), or the cut normal vanished (point is `y_n`).
    Solution {
        point: DenseVector,
        residual_norm: f64,
    },
}

const EXACT_ZERO: f64 = 1e-14;

/// One iteration of the inertial projection method from `state`.
pub fn step_alg1(
    op: &OperatorSpec,
    set: &FeasibleSet,
    state: &SolverState,
    cfg: &SolverConfig,
) -> Result<Alg1Step> {
    let alpha = cfg.alpha.at(state.n);
    let w = state.extrapolate(alpha)?;
    if !w.is_finite() {
        return Err(Error::NonFinite {
            context: "inertial extrapolation",
        });
    }
    let Residual { r, z, .. } = residual(op, set, &w)?;
    let r_norm = r.norm();
    if r_norm <= EXACT_ZERO * (1.0 + w.norm()) {
        return Ok(Alg1Step::Solution {
            point: w,
            residual_norm: r_norm,
        });
    }

    let ls = line_search(op, &w, &r, cfg.gamma, cfg.sigma_ls, cfg.max_ls_exponent)?;

    let cut_normal = match cfg.cut_mode {
        CutMode::Auto => set
            .tangent_projection(&ls.fy)?
            .unwrap_or_else(|| ls.fy.clone()),
        CutMode::Ambient => ls.fy.clone(),
    };
    let normal_norm = cut_normal.norm();
    if normal_norm == 0.0 || normal_norm <= EXACT_ZERO * ls.fy.norm() {
        // h_n vanishes on C: y_n ∈ C with F(y_n) normal to C.
        return Ok(Alg1Step::Solution {
            point: ls.y,
            residual_norm: r_norm,
        });
    }
    let x_next = project_halfspace(&cut_normal, &ls.y, &w)?;
    if !x_next.is_finite() {
        return Err(Error::NonFinite {
            context: "halfspace projection",
        });
    }
    let next = state.advance(x_next.clone());
    Ok(Alg1Step::Advanced {
        iterate: Box::new(Alg1Iterate {
            n: state.n,
            alpha,
            w,
            z,
            r,
            line_search: ls,
            cut_normal,
            x_next,
        }),
        next,
    })
}
