use std::time::Instant;

use crate::config::{AlphaSchedule, CutMode, SolverConfig, StopRule};
use crate::error::{check_dim, Error, Result};
use crate::operators::OperatorSpec;
use crate::sets::FeasibleSet;
use crate::trace::{InvariantTally, IterationRecord, RunStatus, RunTrace};
use crate::vector::DenseVector;

use super::alg1::{step_alg1, Alg1Step};
use super::baselines::{isem_step_bound, step_isem, step_sem};
use super::invariants::{check_alg1_iteration, gamma_value};
use super::{KnownSolutionInfo, Method, SolverState};

const EXACT_ZERO: f64 = 1e-14;

/// Method-specific parameter checks; returns the effective configuration and
/// the fixed step of the extragradient baselines.
fn prepare(op: &OperatorSpec, method: Method, cfg: &SolverConfig) -> Result<(SolverConfig, f64)> {
    cfg.validate()?;
    let mut cfg = cfg.clone();
    match method {
        Method::Alg1 => {
            if cfg.alpha.sup() >= 1.0 / 3.0 {
                return Err(Error::InvalidParameter(format!(
                    "alpha must satisfy 0 <= alpha < 1/3, got sup {}",
                    cfg.alpha.sup()
                )));
            }
            Ok((cfg, 0.0))
        }
        Method::Alg1NoInertia => {
            cfg.alpha = AlphaSchedule::constant(0.0);
            Ok((cfg, 0.0))
        }
        Method::Sem | Method::Isem => {
            let l = op.step_size_constant();
            let lambda = match (cfg.lambda, l) {
                (Some(lambda), _) => lambda,
                (None, Some(l)) if l > 0.0 => 0.1 / l,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "operator {} has no Lipschitz estimate; set lambda explicitly",
                        op.name()
                    )))
                }
            };
            if method == Method::Sem {
                cfg.alpha = AlphaSchedule::constant(0.0);
                if let Some(l) = l {
                    if lambda * l >= 1.0 {
                        return Err(Error::InvalidParameter(format!(
                            "extragradient step needs lambda * L < 1, got {}",
                            lambda * l
                        )));
                    }
                }
            } else {
                let bound = isem_step_bound(cfg.alpha.sup(), cfg.isem_delta)?;
                if let Some(l) = l {
                    if lambda * l > bound {
                        return Err(Error::InvalidParameter(format!(
                            "inertial extragradient step needs lambda * L <= {bound}, got {}",
                            lambda * l
                        )));
                    }
                }
            }
            Ok((cfg, lambda))
        }
    }
}

struct Step {
    w: DenseVector,
    x_next: DenseVector,
    residual: f64,
    eta: f64,
    ls_trials: u32,
    tally: InvariantTally,
}

enum Outcome {
    Advanced(Step),
    Solution(DenseVector),
}

/// Runs `method` on VI(F, C) from `x0` until the stop rule fires, a solution is
/// certified, or `max_iter` iterations elapse.
///
/// Line-search and projection failures, and non-finite values, end the run with
/// a failure status and a diagnostic rather than an error. Parameter and
/// dimension errors are returned as `Err`.
pub fn solve(
    op: &OperatorSpec,
    set: &FeasibleSet,
    method: Method,
    cfg: &SolverConfig,
    x0: &DenseVector,
    known: &KnownSolutionInfo,
) -> Result<RunTrace> {
    check_dim(op.dim(), set.dim())?;
    check_dim(op.dim(), x0.dim())?;
    if let Some(xs) = &known.x_star {
        check_dim(op.dim(), xs.dim())?;
    }
    if !x0.is_finite() {
        return Err(Error::NonFinite { context: "initial point" });
    }
    let (cfg, lambda) = prepare(op, method, cfg)?;
    let x_star = known.x_star.as_ref();

    let start = if cfg.cut_mode == CutMode::Auto && set.is_affine() {
        set.project(x0)?.point
    } else {
        x0.clone()
    };
    let mut state = SolverState::start(start);
    let mut records = Vec::new();
    let mut invariants = InvariantTally::default();
    let clock = Instant::now();
    let elapsed = |c: &Instant| if cfg.record_timing { c.elapsed().as_secs_f64() } else { 0.0 };

    let finish = |records, status, final_point, stopped_at, invariants, diagnostic, secs| RunTrace {
        records,
        status,
        final_point,
        stopped_at,
        invariants,
        diagnostic,
        elapsed: secs,
    };

    while state.n <= cfg.max_iter {
        let n = state.n;
        let alpha = cfg.alpha.at(n);
        let gamma_n = match x_star {
            Some(xs) => Some(gamma_value(&state, alpha, xs)?),
            None => None,
        };

        let outcome = match method {
            Method::Alg1 | Method::Alg1NoInertia => {
                step_alg1(op, set, &state, &cfg).and_then(|step| match step {
                    Alg1Step::Solution { point, .. } => Ok(Outcome::Solution(point)),
                    Alg1Step::Advanced { iterate, next } => {
                        let tally = if cfg.check_mode.due(n) {
                            check_alg1_iteration(op, &cfg, &iterate, &state, &next, x_star)?
                        } else {
                            InvariantTally::default()
                        };
                        let it = *iterate;
                        Ok(Outcome::Advanced(Step {
                            residual: it.r.norm(),
                            eta: it.line_search.eta,
                            ls_trials: it.line_search.m + 1,
                            w: it.w,
                            x_next: it.x_next,
                            tally,
                        }))
                    }
                })
            }
            Method::Sem | Method::Isem => {
                let step = if method == Method::Sem {
                    step_sem(op, set, &state.x_curr, lambda)
                } else {
                    step_isem(op, set, &state, lambda, alpha)
                };
                step.map(|s| {
                    let residual = s.w.sub(&s.y).map(|d| d.norm()).unwrap_or(f64::NAN);
                    if residual <= EXACT_ZERO * (1.0 + s.w.norm()) {
                        Outcome::Solution(s.w)
                    } else {
                        Outcome::Advanced(Step {
                            w: s.w,
                            x_next: s.x_next,
                            residual,
                            eta: lambda,
                            ls_trials: 0,
                            tally: InvariantTally::default(),
                        })
                    }
                })
            }
        };

        let step = match outcome {
            Ok(Outcome::Advanced(step)) => step,
            Ok(Outcome::Solution(point)) => {
                let secs = elapsed(&clock);
                return Ok(finish(records, RunStatus::ExactSolutionFound, point, n, invariants, None, secs));
            }
            Err(e) => {
                let status = match e {
                    Error::LineSearchFailure { .. } | Error::NonFinite { .. } => RunStatus::LineSearchFailure,
                    Error::ProjectionNotConverged { .. } => RunStatus::ProjectionFailure,
                    other => return Err(other),
                };
                log::info!("{method} stopped at iteration {n}: {e}");
                let secs = elapsed(&clock);
                return Ok(finish(
                    records,
                    status,
                    state.x_curr,
                    n,
                    invariants,
                    Some(format!("iteration {n}: {e}")),
                    secs,
                ));
            }
        };

        invariants.merge(&step.tally);
        let step_diff = step.x_next.sub(&state.x_curr)?.norm();
        let norm_next = step.x_next.norm();
        records.push(IterationRecord {
            n,
            step_diff,
            residual: step.residual,
            eta: step.eta,
            ls_trials: step.ls_trials,
            gamma_n,
            elapsed: elapsed(&clock),
            norm_next,
            cut_gap: step.x_next.sub(&step.w)?.norm(),
        });
        let done = match cfg.stop_rule {
            StopRule::StepDiff => step_diff <= cfg.tol,
            StopRule::NormToZero => norm_next <= cfg.tol,
            StopRule::Residual => step.residual <= cfg.tol,
        };
        state = state.advance(step.x_next);
        if done {
            let secs = elapsed(&clock);
            return Ok(finish(records, RunStatus::Converged, state.x_curr, n, invariants, None, secs));
        }
    }

    let secs = elapsed(&clock);
    Ok(finish(
        records,
        RunStatus::MaxIter,
        state.x_curr,
        cfg.max_iter,
        invariants,
        None,
        secs,
    ))
}
