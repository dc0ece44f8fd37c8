use crate::error::{Error, Result};
use crate::operators::OperatorSpec;
use crate::sets::{project_halfspace, FeasibleSet};
use crate::vector::DenseVector;

use super::SolverState;

/// One subgradient extragradient step taken from `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemStep {
    /// Base point of the step (`x_n`, or the extrapolated point for the inertial variant).
    pub w: DenseVector,
    /// `P_C(w − λF(w))`
    pub y: DenseVector,
    pub x_next: DenseVector,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("step size must be positive, got {lambda}")))
    }
}

fn sem_from(op: &OperatorSpec, set: &FeasibleSet, w: DenseVector, lambda: f64) -> Result<SemStep> {
    let fw = op.eval(&w)?;
    let u = w.add_scaled(-lambda, &fw)?;
    let y = set.project(&u)?.point;
    let fy = op.eval(&y)?;
    let target = w.add_scaled(-lambda, &fy)?;
    // T = {v : ⟨u − y, v − y⟩ ≤ 0}; a zero normal makes T the whole space.
    let normal = u.sub(&y)?;
    let x_next = if normal.norm_squared() == 0.0 {
        target
    } else {
        project_halfspace(&normal, &y, &target)?
    };
    if !x_next.is_finite() {
        return Err(Error::NonFinite {
            context: "extragradient step",
        });
    }
    Ok(SemStep { w, y, x_next })
}

/// `y = P_C(x − λF(x))`, `x' = P_T(x − λF(y))` with `T` the halfspace through `y`
/// supporting `C` in the direction `x − λF(x) − y`.
pub fn step_sem(op: &OperatorSpec, set: &FeasibleSet, x: &DenseVector, lambda: f64) -> Result<SemStep> {
    check_lambda(lambda)?;
    sem_from(op, set, x.clone(), lambda)
}

/// The same step taken from `w = x_n + α(x_n − x_{n−1})`.
pub fn step_isem(
    op: &OperatorSpec,
    set: &FeasibleSet,
    state: &SolverState,
    lambda: f64,
    alpha: f64,
) -> Result<SemStep> {
    check_lambda(lambda)?;
    let w = state.extrapolate(alpha)?;
    sem_from(op, set, w, lambda)
}

/// Largest admissible `λL` for the inertial extragradient method,
/// `(½ − 2α − ½α² − δ) / (½ − α + ½α²)`, after checking `0 ≤ α < √5 − 2`
/// and `0 < δ < ½ − 2α − ½α²`.
pub fn isem_step_bound(alpha: f64, delta: f64) -> Result<f64> {
    if !(0.0..5f64.sqrt() - 2.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "inertial extragradient needs 0 <= alpha < sqrt(5) - 2, got {alpha}"
        )));
    }
    let room = 0.5 - 2.0 * alpha - 0.5 * alpha * alpha;
    if !(delta > 0.0 && delta < room) {
        return Err(Error::InvalidParameter(format!(
            "inertial extragradient needs 0 < delta < {room}, got {delta}"
        )));
    }
    Ok((room - delta) / (0.5 - alpha + 0.5 * alpha * alpha))
}
