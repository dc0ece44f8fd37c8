//! Experiments run by `vibench check`.

use inertial_vi::{Method, StopRule};

use crate::config::{ExperimentConfig, MethodEntry, ProblemSpec, SolverOverrides};

/// Alg1 entries labeled by their backtracking base.
pub fn gamma_sweep(gammas: &[f64]) -> Vec<MethodEntry> {
    gammas
        .iter()
        .map(|&g| MethodEntry {
            method: Method::Alg1,
            label: Some(format!("alg1_gamma{g}")),
            overrides: SolverOverrides {
                gamma: Some(g),
                ..SolverOverrides::default()
            },
        })
        .collect()
}

pub fn builtin_configs() -> Vec<(&'static str, ExperimentConfig)> {
    let all = Method::ALL.iter().copied().map(MethodEntry::new).collect();

    let exponential = ExperimentConfig::new(ProblemSpec::Exponential, vec![MethodEntry::new(Method::Alg1)]);

    let mut harker_pang = ExperimentConfig::new(ProblemSpec::HarkerPang { m_dim: 10, k_cons: 30 }, all);
    harker_pang.seeds = (0..5).collect();

    let mut nash_cournot = ExperimentConfig::new(
        ProblemSpec::NashCournot { n_units: 10 },
        gamma_sweep(&[0.01, 0.1, 0.5, 0.8]),
    );
    nash_cournot.seeds = (0..3).collect();
    nash_cournot.stop_rule = Some(StopRule::StepDiff);

    let volterra = ExperimentConfig::new(ProblemSpec::Volterra { grid_size: 100 }, vec![MethodEntry::new(Method::Alg1)]);

    vec![
        ("exponential", exponential),
        ("harker_pang", harker_pang),
        ("nash_cournot", nash_cournot),
        ("volterra", volterra),
    ]
}
