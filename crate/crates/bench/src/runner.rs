//! Runs every (method, seed, repetition) of an experiment and writes its artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use inertial_vi::{solve, RunStatus, RunTrace, StopRule};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, MethodEntry};
use crate::error::BenchError;
use crate::report::{emit_plot_csv, emit_trace_csv, render_table, summarize, RunOutcome, SummaryRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<SummaryRow>,
    pub runs: Vec<RunOutcome>,
}

impl ExperimentReport {
    pub fn all_converged(&self) -> bool {
        self.runs.iter().all(RunOutcome::converged)
    }

    pub fn invariant_violations(&self) -> u64 {
        self.runs.iter().map(|r| r.invariant_violations).sum()
    }

    pub fn row(&self, method: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

/// File name of one run's trace and plot data.
pub fn trace_file_name(problem: &str, method: &str, seed: u64, rep: u32) -> String {
    format!("{problem}__{method}__seed{seed}__rep{rep}.csv")
}

fn final_metric(trace: &RunTrace, rule: StopRule) -> f64 {
    match (rule, trace.last()) {
        (StopRule::NormToZero, _) | (_, None) => trace.final_point.norm(),
        (StopRule::StepDiff, Some(r)) => r.step_diff,
        (StopRule::Residual, Some(r)) => r.residual,
    }
}

struct Job<'a> {
    entry: &'a MethodEntry,
    seed: u64,
    rep: u32,
}

fn run_one(cfg: &ExperimentConfig, job: &Job, out: &Path) -> Result<RunOutcome, BenchError> {
    let inst = cfg
        .problem
        .instance(job.seed)
        .map_err(|e| BenchError::Config(format!("problem: {e}")))?;
    let scfg = cfg.solver_config(job.entry);
    let label = job.entry.label().to_string();
    let mut outcome = RunOutcome {
        method: label.clone(),
        problem: inst.label.clone(),
        seed: job.seed,
        repetition: job.rep,
        status: "error".into(),
        iterations: 0,
        cpu_seconds: 0.0,
        final_metric: f64::NAN,
        invariant_violations: 0,
        invariants_checked: 0,
        diagnostic: None,
    };
    let trace = match solve(&inst.operator, &inst.feasible, job.entry.method, &scfg, &inst.initial_point, &inst.known) {
        Ok(t) => t,
        Err(e) => {
            log::warn!("{label} seed {}: {e}", job.seed);
            outcome.diagnostic = Some(e.to_string());
            return Ok(outcome);
        }
    };
    let name = trace_file_name(&inst.label, &label, job.seed, job.rep);
    emit_trace_csv(&trace, &out.join("traces").join(&name))?;
    emit_plot_csv(&trace, &out.join("plots").join(&name))?;
    if trace.status != RunStatus::Converged && trace.status != RunStatus::ExactSolutionFound {
        log::info!("{label} seed {} ended with {}", job.seed, trace.status);
    }
    outcome.status = trace.status.as_str().into();
    outcome.iterations = trace.iterations() as u64;
    outcome.cpu_seconds = trace.elapsed;
    outcome.final_metric = final_metric(&trace, scfg.stop_rule);
    outcome.invariant_violations = trace.invariants.violations();
    outcome.invariants_checked = trace.invariants.checked;
    outcome.diagnostic = trace.diagnostic;
    Ok(outcome)
}

/// Runs the experiment in parallel and writes `traces/`, `plots/`,
/// `summary.json` and `summary.txt` under `out`.
///
/// Runs that fail to converge are reported in the summary and do not abort the sweep.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport, BenchError> {
    cfg.validate()?;
    for sub in ["traces", "plots"] {
        let dir = out.join(sub);
        fs::create_dir_all(&dir).map_err(BenchError::io(dir))?;
    }
    let jobs: Vec<Job> = cfg
        .methods
        .iter()
        .flat_map(|entry| {
            cfg.seeds
                .iter()
                .flat_map(move |&seed| (0..cfg.repetitions).map(move |rep| Job { entry, seed, rep }))
        })
        .collect();
    let runs = jobs
        .par_iter()
        .map(|job| run_one(cfg, job, out))
        .collect::<Result<Vec<_>, _>>()?;

    let problem = runs.first().map(|r| r.problem.clone()).unwrap_or_default();
    let rows = cfg
        .methods
        .iter()
        .map(|entry| {
            let group: Vec<&RunOutcome> = runs.iter().filter(|r| r.method == entry.label()).collect();
            summarize(entry.label(), &problem, &group)
        })
        .collect();
    let report = ExperimentReport { rows, runs };

    let json_path = out.join("summary.json");
    fs::write(&json_path, serde_json::to_string_pretty(&report)?).map_err(BenchError::io(&json_path))?;
    let txt_path = out.join("summary.txt");
    fs::write(&txt_path, render_table(&report.rows)).map_err(BenchError::io(&txt_path))?;
    Ok(report)
}

/// Output directory: explicit override, then the config's, then `out`.
pub fn resolve_output_dir(cfg: &ExperimentConfig, cli: Option<PathBuf>) -> PathBuf {
    cli.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}
