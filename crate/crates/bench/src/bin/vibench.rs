use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use inertial_vi::CheckMode;
use vi_bench::builtin::builtin_configs;
use vi_bench::runner::resolve_output_dir;
use vi_bench::{parse_config, render_table, run_experiment, BenchError, ExperimentConfig, ExperimentReport};

const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_INVARIANT: u8 = 3;
const EXIT_CONFIG: u8 = 4;

#[derive(Parser)]
#[command(name = "vibench", version, about = "Run variational inequality solver experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Checked,
    Fast,
}

impl From<Mode> for CheckMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Checked => CheckMode::Checked,
            Mode::Fast => CheckMode::Fast,
        }
    }
}

#[derive(clap::Args)]
struct Common {
    /// Output directory (overrides the config's `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Invariant checking on every iteration, or on every 10th.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Seed range `A..B` (half-open) or `A..=B`, replacing the config's seeds.
        #[arg(long, value_parser = parse_seeds)]
        seeds: Option<Seeds>,
        #[command(flatten)]
        common: Common,
    },
    /// Run one experiment config over a seed range.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_seeds)]
        seeds: Seeds,
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in experiments with invariant checks.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Debug, PartialEq)]
struct Seeds(Vec<u64>);

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    let (a, b, inclusive) = if let Some((a, b)) = s.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = s.split_once("..") {
        (a, b, false)
    } else {
        let v: u64 = s.parse().map_err(|e| format!("bad seed {s:?}: {e}"))?;
        return Ok(Seeds(vec![v]));
    };
    let a: u64 = a.trim().parse().map_err(|e| format!("bad range start {a:?}: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("bad range end {b:?}: {e}"))?;
    let seeds: Vec<u64> = if inclusive { (a..=b).collect() } else { (a..b).collect() };
    if seeds.is_empty() {
        return Err(format!("seed range {s:?} is empty"));
    }
    Ok(Seeds(seeds))
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, BenchError> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn apply(cfg: &mut ExperimentConfig, seeds: Option<Seeds>, common: &Common) {
    if let Some(Seeds(s)) = seeds {
        cfg.seeds = s;
    }
    if let Some(m) = common.mode {
        cfg.mode = m.into();
    }
}

fn verdict(reports: &[ExperimentReport]) -> u8 {
    if reports.iter().any(|r| r.invariant_violations() > 0) {
        EXIT_INVARIANT
    } else if reports.iter().any(|r| !r.all_converged()) {
        EXIT_NOT_CONVERGED
    } else {
        0
    }
}

fn execute(cli: Cli) -> Result<u8, BenchError> {
    let mut reports = Vec::new();
    match cli.command {
        Command::Run { config, seeds, common } => {
            let mut cfg = load(&config)?;
            apply(&mut cfg, seeds, &common);
            let out = resolve_output_dir(&cfg, common.out.clone());
            reports.push(run_experiment(&cfg, &out)?);
        }
        Command::Sweep { config, seeds, common } => {
            let mut cfg = load(&config)?;
            apply(&mut cfg, Some(seeds), &common);
            let out = resolve_output_dir(&cfg, common.out.clone());
            reports.push(run_experiment(&cfg, &out)?);
        }
        Command::Check { common } => {
            let root = common.out.clone().unwrap_or_else(|| PathBuf::from("out/check"));
            for (name, mut cfg) in builtin_configs() {
                apply(&mut cfg, None, &common);
                reports.push(run_experiment(&cfg, &root.join(name))?);
            }
        }
    }
    for r in &reports {
        print!("{}", render_table(&r.rows));
    }
    Ok(verdict(&reports))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e @ (BenchError::Schema { .. } | BenchError::Config(_))) => {
            eprintln!("vibench: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("vibench: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("0..3").unwrap().0, vec![0, 1, 2]);
        assert_eq!(parse_seeds("2..=4").unwrap().0, vec![2, 3, 4]);
        assert_eq!(parse_seeds("7").unwrap().0, vec![7]);
        assert!(parse_seeds("3..3").is_err());
        assert!(parse_seeds("a..b").is_err());
    }
}
