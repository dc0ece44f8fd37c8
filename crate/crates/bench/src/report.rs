//! Trace CSVs, plot data and summary tables.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use inertial_vi::{RunStatus, RunTrace};
use serde::{Deserialize, Serialize};

use crate::error::BenchError;

pub const TRACE_HEADER: &str = "n,step_diff,residual,eta,ls_trials,gamma_n,elapsed_s";
pub const PLOT_HEADER: &str = "n,step_diff,norm_x";

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_lines(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<(), BenchError> {
    let file = File::create(path).map_err(BenchError::io(path))?;
    let mut out = BufWriter::new(file);
    let write = || -> std::io::Result<()> {
        writeln!(out, "{header}")?;
        for row in rows {
            writeln!(out, "{row}")?;
        }
        out.flush()
    };
    write().map_err(BenchError::io(path))
}

/// One row per iteration record; `gamma_n` is left empty when no reference solution is known.
pub fn emit_trace_csv(trace: &RunTrace, path: &Path) -> Result<(), BenchError> {
    let rows = trace.records.iter().map(|r| {
        format!(
            "{},{},{},{},{},{},{}",
            r.n,
            fmt_real(r.step_diff),
            fmt_real(r.residual),
            fmt_real(r.eta),
            r.ls_trials,
            r.gamma_n.map(fmt_real).unwrap_or_default(),
            fmt_real(r.elapsed),
        )
    });
    write_lines(path, TRACE_HEADER, rows)
}

/// Iteration against `‖x_{n+1} − x_n‖` and `‖x_{n+1}‖`.
pub fn emit_plot_csv(trace: &RunTrace, path: &Path) -> Result<(), BenchError> {
    let rows = trace
        .records
        .iter()
        .map(|r| format!("{},{},{}", r.n, fmt_real(r.step_diff), fmt_real(r.norm_next)));
    write_lines(path, PLOT_HEADER, rows)
}

/// What one (method, seed, repetition) run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub method: String,
    pub problem: String,
    pub seed: u64,
    pub repetition: u32,
    /// A [`RunStatus`] name, or `"error"` when the solver refused to start.
    pub status: String,
    pub iterations: u64,
    pub cpu_seconds: f64,
    /// `‖x_N‖`, the last step difference or the last residual, matching the stop rule.
    pub final_metric: f64,
    pub invariant_violations: u64,
    pub invariants_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl RunOutcome {
    pub fn converged(&self) -> bool {
        self.status == RunStatus::Converged.as_str() || self.status == RunStatus::ExactSolutionFound.as_str()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub median: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Some(Stats {
            median,
            mean: v.iter().sum::<f64>() / n as f64,
            min: v[0],
            max: v[n - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub problem: String,
    pub runs: usize,
    pub converged: usize,
    pub failed: usize,
    /// Over converged runs only.
    pub iterations: Option<Stats>,
    pub cpu_seconds: Option<Stats>,
    pub final_metric: Option<Stats>,
    pub invariant_violations: u64,
}

/// Statistics of one method's runs; failures are counted but excluded from the stats.
pub fn summarize(method: &str, problem: &str, runs: &[&RunOutcome]) -> SummaryRow {
    let ok: Vec<&&RunOutcome> = runs.iter().filter(|r| r.converged()).collect();
    let col = |f: fn(&RunOutcome) -> f64| Stats::of(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
    SummaryRow {
        method: method.to_string(),
        problem: problem.to_string(),
        runs: runs.len(),
        converged: ok.len(),
        failed: runs.len() - ok.len(),
        iterations: col(|r| r.iterations as f64),
        cpu_seconds: col(|r| r.cpu_seconds),
        final_metric: col(|r| r.final_metric),
        invariant_violations: runs.iter().map(|r| r.invariant_violations).sum(),
    }
}

/// Plain-text table of iterations, CPU time and final metric.
pub fn render_table(rows: &[SummaryRow]) -> String {
    let header = [
        "method", "problem", "runs", "failed", "iter_median", "iter_mean", "iter_min", "iter_max",
        "cpu_median_s", "metric_median", "violations",
    ];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let it = r.iterations;
            let opt = |s: Option<Stats>, f: fn(&Stats) -> f64, prec: usize| {
                s.map(|s| format!("{:.*}", prec, f(&s))).unwrap_or_else(|| "-".into())
            };
            vec![
                r.method.clone(),
                r.problem.clone(),
                r.runs.to_string(),
                r.failed.to_string(),
                opt(it, |s| s.median, 1),
                opt(it, |s| s.mean, 1),
                opt(it, |s| s.min, 0),
                opt(it, |s| s.max, 0),
                opt(r.cpu_seconds, |s| s.median, 4),
                r.final_metric.map(|s| format!("{:.3e}", s.median)).unwrap_or_else(|| "-".into()),
                r.invariant_violations.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|j| cells.iter().map(|c| c[j].len()).chain([header[j].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |out: &mut String, items: &[&str]| {
        // Text columns left-aligned, numbers right-aligned.
        let parts: Vec<String> = items
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (s, w))| if j < 2 { format!("{s:<w$}") } else { format!("{s:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &header);
    for c in &cells {
        line(&mut out, &c.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(status: &str, iterations: u64) -> RunOutcome {
        RunOutcome {
            method: "alg1".into(),
            problem: "p".into(),
            seed: 0,
            repetition: 0,
            status: status.into(),
            iterations,
            cpu_seconds: 0.0,
            final_metric: 1e-4,
            invariant_violations: 0,
            invariants_checked: iterations,
            diagnostic: None,
        }
    }

    #[test]
    fn median_of_three() {
        let runs = [outcome("converged", 10), outcome("converged", 20), outcome("converged", 30)];
        let refs: Vec<&RunOutcome> = runs.iter().collect();
        let row = summarize("alg1", "p", &refs);
        assert_eq!(row.iterations.unwrap().median, 20.0);
        assert_eq!(row.iterations.unwrap().mean, 20.0);
    }

    #[test]
    fn single_run_group() {
        let runs = [outcome("converged", 7)];
        let row = summarize("alg1", "p", &runs.iter().collect::<Vec<_>>());
        let it = row.iterations.unwrap();
        assert_eq!((it.median, it.mean, it.min, it.max), (7.0, 7.0, 7.0, 7.0));
    }

    #[test]
    fn failures_are_tallied_and_excluded() {
        let runs = [outcome("converged", 10), outcome("max_iter", 1000), outcome("exact_solution_found", 2)];
        let row = summarize("alg1", "p", &runs.iter().collect::<Vec<_>>());
        assert_eq!(row.failed, 1);
        assert_eq!(row.converged, 2);
        assert_eq!(row.iterations.unwrap().max, 10.0);
    }

    #[test]
    fn all_failed_group_has_no_stats() {
        let runs = [outcome("line_search_failure", 3)];
        let row = summarize("alg1", "p", &runs.iter().collect::<Vec<_>>());
        assert!(row.iterations.is_none());
        assert!(render_table(&[row]).contains(" -"));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_real(2.0), "2.0000000000000000e0");
    }
}
