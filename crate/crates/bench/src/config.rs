//! Experiment configuration documents.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use inertial_vi::problems::{
    gen_exponential, gen_harker_pang, gen_nash_cournot, gen_volterra, HarkerPangParams,
};
use inertial_vi::solvers::isem_step_bound;
use inertial_vi::{AlphaSchedule, CheckMode, CutMode, Method, ProblemInstance, SolverConfig, StopRule};
use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::BenchError;

fn default_m_dim() -> usize {
    10
}
fn default_k_cons() -> usize {
    30
}
fn default_units() -> usize {
    10
}
fn default_grid() -> usize {
    100
}

/// Benchmark family and its size parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    HarkerPang {
        #[serde(default = "default_m_dim")]
        m_dim: usize,
        #[serde(default = "default_k_cons")]
        k_cons: usize,
    },
    NashCournot {
        #[serde(default = "default_units")]
        n_units: usize,
    },
    Volterra {
        #[serde(default = "default_grid")]
        grid_size: usize,
    },
    Exponential,
}

impl ProblemSpec {
    pub fn instance(&self, seed: u64) -> inertial_vi::Result<ProblemInstance> {
        match *self {
            ProblemSpec::HarkerPang { m_dim, k_cons } => gen_harker_pang(&HarkerPangParams { m_dim, k_cons, seed }),
            ProblemSpec::NashCournot { n_units } => gen_nash_cournot(n_units, seed),
            ProblemSpec::Volterra { grid_size } => gen_volterra(grid_size),
            ProblemSpec::Exponential => gen_exponential(),
        }
    }

    /// Stop rule, tolerance and iteration cap used when the config leaves them unset.
    pub fn default_stopping(&self) -> (StopRule, f64, u64) {
        match self {
            ProblemSpec::HarkerPang { .. } => (StopRule::NormToZero, 1e-3, 100_000),
            ProblemSpec::NashCournot { .. } => (StopRule::StepDiff, 1e-2, 100_000),
            ProblemSpec::Volterra { .. } => (StopRule::Residual, 1e-4, 10_000),
            ProblemSpec::Exponential => (StopRule::NormToZero, 1e-6, 500),
        }
    }
}

/// Per-method solver settings that replace the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_ls: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSchedule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isem_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ls_exponent: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut_mode: Option<CutMode>,
}

/// One method to run. In JSON either a bare name (`"alg1"`) or an object
/// `{"method": "alg1", "label": "...", "overrides": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodEntry {
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "is_default_overrides")]
    pub overrides: SolverOverrides,
}

fn is_default_overrides(o: &SolverOverrides) -> bool {
    *o == SolverOverrides::default()
}

impl MethodEntry {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            label: None,
            overrides: SolverOverrides::default(),
        }
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.method.as_str())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MethodEntryFull {
    method: Method,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    overrides: SolverOverrides,
}

impl<'de> Deserialize<'de> for MethodEntry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntryVisitor;

        impl<'de> Visitor<'de> for EntryVisitor {
            type Value = MethodEntry;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a method name or a method object")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<MethodEntry, E> {
                Method::deserialize(de::value::StrDeserializer::new(v)).map(MethodEntry::new)
            }

            fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<MethodEntry, A::Error> {
                let full = MethodEntryFull::deserialize(de::value::MapAccessDeserializer::new(map))?;
                Ok(MethodEntry {
                    method: full.method,
                    label: full.label,
                    overrides: full.overrides,
                })
            }
        }

        deserializer.deserialize_any(EntryVisitor)
    }
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_repetitions() -> u32 {
    1
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub methods: Vec<MethodEntry>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_rule: Option<StopRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<u64>,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub mode: CheckMode,
    /// Record wall-clock times in traces. Turn off for byte-reproducible artifacts.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemSpec, methods: Vec<MethodEntry>) -> Self {
        Self {
            problem,
            methods,
            seeds: default_seeds(),
            stop_rule: None,
            tol: None,
            max_iter: None,
            repetitions: 1,
            output_dir: None,
            mode: CheckMode::Checked,
            record_timing: true,
        }
    }

    /// Effective solver settings for `entry`: library defaults, then family
    /// stopping defaults, then experiment-level and per-method settings.
    pub fn solver_config(&self, entry: &MethodEntry) -> SolverConfig {
        let (rule, tol, max_iter) = self.problem.default_stopping();
        let o = &entry.overrides;
        let d = SolverConfig::default();
        SolverConfig {
            gamma: o.gamma.unwrap_or(d.gamma),
            sigma_ls: o.sigma_ls.unwrap_or(d.sigma_ls),
            alpha: o.alpha.unwrap_or(d.alpha),
            lambda: o.lambda.or(d.lambda),
            isem_delta: o.isem_delta.unwrap_or(d.isem_delta),
            max_iter: o.max_iter.or(self.max_iter).unwrap_or(max_iter),
            tol: self.tol.unwrap_or(tol),
            stop_rule: self.stop_rule.unwrap_or(rule),
            max_ls_exponent: o.max_ls_exponent.unwrap_or(d.max_ls_exponent),
            check_mode: self.mode,
            cut_mode: o.cut_mode.unwrap_or(d.cut_mode),
            record_timing: self.record_timing,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let invalid = |msg: String| Err(BenchError::Config(msg));
        if self.methods.is_empty() {
            return invalid("at least one method is required".into());
        }
        if self.seeds.is_empty() {
            return invalid("at least one seed is required".into());
        }
        if self.repetitions == 0 {
            return invalid("repetitions must be at least 1".into());
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return invalid(format!("tol must be positive, got {tol}"));
            }
        }
        let mut labels = BTreeSet::new();
        for (i, entry) in self.methods.iter().enumerate() {
            let label = entry.label();
            if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
                return invalid(format!("methods[{i}]: label {label:?} must be nonempty [A-Za-z0-9_.-]"));
            }
            if !labels.insert(label) {
                return invalid(format!("methods[{i}]: duplicate label {label:?}"));
            }
            let cfg = self.solver_config(entry);
            let ctx = |e: inertial_vi::Error| BenchError::Config(format!("methods[{i}] ({label}): {e}"));
            cfg.validate().map_err(ctx)?;
            match entry.method {
                Method::Alg1 if cfg.alpha.sup() >= 1.0 / 3.0 => {
                    return invalid(format!(
                        "methods[{i}] ({label}): alpha must satisfy 0 <= alpha < 1/3 for alg1, got {}",
                        cfg.alpha.sup()
                    ));
                }
                Method::Isem => {
                    isem_step_bound(cfg.alpha.sup(), cfg.isem_delta).map_err(ctx)?;
                }
                _ => {}
            }
        }
        self.problem
            .instance(self.seeds[0])
            .map_err(|e| BenchError::Config(format!("problem: {e}")))?;
        Ok(())
    }
}

/// Parses and validates a JSON experiment config. Schema errors carry the
/// path of the offending field.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, BenchError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| BenchError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}
