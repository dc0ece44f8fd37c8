//! Runtime checks of the inequalities every iteration of the inertial projection
//! method must satisfy. Each check allows a relative slack plus a term that
//! bounds the floating-point error of forming the differences involved, since
//! quantities like `w − y` lose relative accuracy once `‖r‖ ≪ ‖w‖`.

use crate::config::SolverConfig;
use crate::error::Result;
use crate::operators::OperatorSpec;
use crate::trace::InvariantTally;
use crate::vector::DenseVector;

use super::alg1::{armijo_holds, Alg1Iterate};
use super::SolverState;

const EPS: f64 = f64::EPSILON;
/// Relative slack of the cut inequalities.
pub const CUT_RTOL: f64 = 1e-10;
/// Relative slack of the distance inequalities.
pub const DESCENT_RTOL: f64 = 1e-8;

fn rounding(dim: usize, magnitude: f64) -> f64 {
    4.0 * EPS * (1 + dim) as f64 * magnitude
}

/// `m_n` satisfies the sufficient-progress inequality and `m_n − 1` does not.
pub fn line_search_minimal(op: &OperatorSpec, it: &Alg1Iterate, cfg: &SolverConfig) -> Result<bool> {
    let ls = &it.line_search;
    if !armijo_holds(&ls.fy, &it.r, cfg.sigma_ls)? {
        return Ok(false);
    }
    if ls.m == 0 {
        return Ok(true);
    }
    let eta = cfg.gamma.powi(ls.m as i32 - 1);
    let y = it.w.add_scaled(-eta, &it.r)?;
    let fy = op.eval(&y)?;
    Ok(!armijo_holds(&fy, &it.r, cfg.sigma_ls)?)
}

/// `h_n(w_n) ≥ (σ η_n / 2) ‖w_n − z_n‖²`
pub fn cut_lower_bound_holds(it: &Alg1Iterate, sigma: f64) -> Result<bool> {
    let ls = &it.line_search;
    let lhs = it.cut_value(&it.w)?;
    let rhs = 0.5 * sigma * ls.eta * it.r.norm_squared();
    let slack = CUT_RTOL * rhs.abs() + rounding(it.w.dim(), ls.fy.norm() * (it.w.norm() + ls.y.norm()));
    Ok(lhs >= rhs - slack)
}

/// `h_n(x*) ≤ 0`
pub fn separates_solution(it: &Alg1Iterate, x_star: &DenseVector) -> Result<bool> {
    let ls = &it.line_search;
    let h = it.cut_value(x_star)?;
    let scale = ls.fy.norm() * (x_star.norm() + ls.y.norm());
    Ok(h <= CUT_RTOL * scale.max(1.0) + rounding(x_star.dim(), scale))
}

/// `‖x_{n+1} − x*‖² ≤ ‖w_n − x*‖² − ‖x_{n+1} − w_n‖²`
pub fn fejer_holds(it: &Alg1Iterate, x_star: &DenseVector) -> Result<bool> {
    let lhs = it.x_next.sub(x_star)?.norm_squared();
    let dw = it.w.sub(x_star)?.norm_squared();
    let rhs = dw - it.x_next.sub(&it.w)?.norm_squared();
    let magnitude = (it.w.norm() + it.x_next.norm() + x_star.norm()).powi(2);
    Ok(lhs <= rhs + DESCENT_RTOL * dw + rounding(x_star.dim(), magnitude))
}

/// `Γ_n = ‖x_n − x*‖² − α_n ‖x_{n−1} − x*‖² + 2α_n ‖x_n − x_{n−1}‖²`
pub fn gamma_value(state: &SolverState, alpha: f64, x_star: &DenseVector) -> Result<f64> {
    let cur = state.x_curr.sub(x_star)?.norm_squared();
    let prev = state.x_prev.sub(x_star)?.norm_squared();
    let step = state.x_curr.sub(&state.x_prev)?.norm_squared();
    Ok(cur - alpha * prev + 2.0 * alpha * step)
}

/// `Γ_{n+1} − Γ_n ≤ −(1 − 3ᾱ) ‖x_{n+1} − x_n‖²` with `ᾱ` the schedule's supremum.
pub fn gamma_descends(
    before: &SolverState,
    after: &SolverState,
    cfg: &SolverConfig,
    x_star: &DenseVector,
) -> Result<bool> {
    let g0 = gamma_value(before, cfg.alpha.at(before.n), x_star)?;
    let g1 = gamma_value(after, cfg.alpha.at(after.n), x_star)?;
    let step = after.x_curr.sub(&after.x_prev)?.norm_squared();
    let bound = -(1.0 - 3.0 * cfg.alpha.sup()) * step;
    let scale = before.x_prev.sub(x_star)?.norm_squared()
        + before.x_curr.sub(x_star)?.norm_squared()
        + after.x_curr.sub(x_star)?.norm_squared();
    let magnitude = (before.x_prev.norm() + before.x_curr.norm() + after.x_curr.norm() + x_star.norm()).powi(2);
    Ok(g1 - g0 <= bound + DESCENT_RTOL * scale + rounding(x_star.dim(), magnitude))
}

/// Runs every applicable check on one advancing iteration from `before` to `after`.
pub fn check_alg1_iteration(
    op: &OperatorSpec,
    cfg: &SolverConfig,
    it: &Alg1Iterate,
    before: &SolverState,
    after: &SolverState,
    x_star: Option<&DenseVector>,
) -> Result<InvariantTally> {
    let mut t = InvariantTally {
        checked: 1,
        ..InvariantTally::default()
    };
    if !line_search_minimal(op, it, cfg)? {
        log::warn!("iteration {}: line search step m = {} is not minimal", it.n, it.line_search.m);
        t.line_search_minimality += 1;
    }
    if !cut_lower_bound_holds(it, cfg.sigma_ls)? {
        log::warn!("iteration {}: cut lower bound violated", it.n);
        t.cut_lower_bound += 1;
    }
    if let Some(xs) = x_star {
        if !separates_solution(it, xs)? {
            log::warn!("iteration {}: cut does not separate the solution", it.n);
            t.separation += 1;
        }
        if !fejer_holds(it, xs)? {
            log::warn!("iteration {}: Fejer descent violated", it.n);
            t.fejer += 1;
        }
        if !gamma_descends(before, after, cfg, xs)? {
            log::warn!("iteration {}: Gamma descent violated", it.n);
            t.gamma_descent += 1;
        }
    }
    Ok(t)
}
