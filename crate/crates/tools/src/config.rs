//! Experiment configuration files (TOML).
//!
//! ```toml
//! problem = "lorenz"
//! x0 = [-1.0, -1.0, -1.0]
//! strategies = ["fixed", "full"]       # fixed | full | restricted
//! c_set = [-1.0, 1.0]                  # default
//! seed = 0                             # default
//! output_dir = "output/lorenz"         # default "output"
//! output_formats = ["csv", "json"]     # default both
//!
//! [params]                             # problem parameter overrides
//! rho = 2.0
//!
//! [simulation]                         # all optional
//! dt = 0.01
//! n_steps = 1000
//! residual_tol = 1e-12
//! integrator_rel_tol = 1e-8
//! integrator_abs_tol = 1e-10
//! divergence_norm = 1e4
//! settle_norm = 1e-6
//! fixed_member = [2, 2, 4, -1.0]       # or fixed_alpha = [...]; default all zeros
//!
//! [optimizer]                          # all optional
//! max_iters = 200
//! grad_step = 1e-6
//! init_mode = "warm-start"             # warm-start | ones | zeros
//! line_search_bracket = 2.0
//! restarts = 1
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;

use sdre_core::model::{Coefficients, ControlProblem, PerturbationSpec, RepresentationFamily};
use sdre_core::optimizer::{InitMode, OptimizerConfig, Strategy};
use sdre_core::simulate::SimulationConfig;

use crate::registry::Registry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Coefficients used by the fixed strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedChoice {
    /// `α = 0`, the base representation.
    Base,
    /// Explicit reduced coefficients.
    Alpha(Vec<f64>),
    /// `α = eᵢ` for the family member built from this perturbation.
    Member(PerturbationSpec),
}

impl FixedChoice {
    pub fn resolve<P: ControlProblem>(&self, family: &RepresentationFamily<P>) -> Result<Coefficients, String> {
        match self {
            FixedChoice::Base => Ok(Coefficients::zeros(family.len())),
            FixedChoice::Alpha(v) => {
                if v.len() != family.len() {
                    return Err(format!(
                        "fixed_alpha has {} entries, the family has {} members",
                        v.len(),
                        family.len()
                    ));
                }
                Coefficients::new(v.clone()).map_err(|e| e.to_string())
            }
            FixedChoice::Member(p) => family
                .position(p)
                .map(|i| Coefficients::axis(family.len(), i, 1.0))
                .ok_or_else(|| format!("perturbation {:?} is not in the family", p.one_based())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: String,
    pub params: BTreeMap<String, f64>,
    pub x0: Vec<f64>,
    /// Shared settings; `optimizer.strategy` is overridden per run.
    pub simulation: SimulationConfig,
    pub fixed: FixedChoice,
    pub strategies: Vec<Strategy>,
    pub c_set: Vec<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub output_formats: Vec<OutputFormat>,
}

impl ExperimentConfig {
    pub fn wants(&self, format: OutputFormat) -> bool {
        self.output_formats.contains(&format)
    }

    /// Simulation settings for one strategy.
    pub fn simulation_for(&self, strategy: Strategy) -> SimulationConfig {
        let mut sim = self.simulation.clone();
        sim.optimizer.strategy = strategy;
        sim.optimizer.seed = self.seed;
        sim.optimizer.tol = sim.residual_tol;
        sim
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// Malformed document; `line` is one-based when known.
    Parse { line: Option<usize>, message: String },
    Validation(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse {
                line: Some(l),
                message,
            } => write!(f, "parse error at line {l}: {message}"),
            ConfigError::Parse { line: None, message } => write!(f, "parse error: {message}"),
            ConfigError::Validation(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    x0: Vec<f64>,
    #[serde(default)]
    simulation: RawSimulation,
    #[serde(default)]
    optimizer: RawOptimizer,
    strategies: Vec<String>,
    c_set: Option<Vec<f64>>,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    output_formats: Option<Vec<String>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    dt: Option<f64>,
    n_steps: Option<usize>,
    residual_tol: Option<f64>,
    integrator_rel_tol: Option<f64>,
    integrator_abs_tol: Option<f64>,
    divergence_norm: Option<f64>,
    settle_norm: Option<f64>,
    fixed_alpha: Option<Vec<f64>>,
    fixed_member: Option<(usize, usize, usize, f64)>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOptimizer {
    max_iters: Option<usize>,
    grad_step: Option<f64>,
    init_mode: Option<String>,
    line_search_bracket: Option<f64>,
    restarts: Option<usize>,
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation(msg.into())
}

/// Parses and validates against the built-in problems.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_with(text, &Registry::with_defaults())
}

pub fn parse_config_with(text: &str, registry: &Registry) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1),
        message: e.message().to_string(),
    })?;

    let info = registry
        .info(&raw.problem)
        .ok_or_else(|| invalid(format!("unknown problem '{}'", raw.problem)))?;
    if raw.x0.len() != info.state_dim {
        return Err(invalid(format!(
            "x0 has {} entries, '{}' has dimension {}",
            raw.x0.len(),
            raw.problem,
            info.state_dim
        )));
    }
    if raw.x0.iter().any(|v| !v.is_finite()) {
        return Err(invalid("x0 must be finite"));
    }
    if raw.strategies.is_empty() {
        return Err(invalid("strategies must not be empty"));
    }
    let strategies = raw
        .strategies
        .iter()
        .map(|s| Strategy::from_name(s).ok_or_else(|| invalid(format!("unknown strategy '{s}'"))))
        .collect::<Result<Vec<_>, _>>()?;

    let defaults = OptimizerConfig::default();
    let o = raw.optimizer;
    let init_mode = match o.init_mode {
        Some(m) => InitMode::from_name(&m).ok_or_else(|| invalid(format!("unknown init_mode '{m}'")))?,
        None => defaults.init_mode,
    };
    let seed = raw.seed.unwrap_or(0);
    let s = raw.simulation;
    let base = SimulationConfig::default();
    let residual_tol = s.residual_tol.unwrap_or(base.residual_tol);
    let simulation = SimulationConfig {
        dt: s.dt.unwrap_or(base.dt),
        n_steps: s.n_steps.unwrap_or(base.n_steps),
        residual_tol,
        optimizer: OptimizerConfig {
            strategy: strategies[0],
            tol: residual_tol,
            max_iters: o.max_iters.unwrap_or(defaults.max_iters),
            grad_step: o.grad_step.unwrap_or(defaults.grad_step),
            init_mode,
            line_search_bracket: o.line_search_bracket.unwrap_or(defaults.line_search_bracket),
            restarts: o.restarts.unwrap_or(defaults.restarts),
            seed,
        },
        integrator_rel_tol: s.integrator_rel_tol.unwrap_or(base.integrator_rel_tol),
        integrator_abs_tol: s.integrator_abs_tol.unwrap_or(base.integrator_abs_tol),
        divergence_norm: s.divergence_norm.unwrap_or(base.divergence_norm),
        settle_norm: s.settle_norm.unwrap_or(base.settle_norm),
        fixed_alpha: None,
    };
    simulation.validate().map_err(|e| invalid(e.to_string()))?;

    let fixed = match (s.fixed_alpha, s.fixed_member) {
        (Some(_), Some(_)) => return Err(invalid("give fixed_alpha or fixed_member, not both")),
        (Some(a), None) => FixedChoice::Alpha(a),
        (None, Some((i1, j1, j2, c))) => FixedChoice::Member(
            PerturbationSpec::from_one_based(i1, j1, j2, c).map_err(|e| invalid(e.to_string()))?,
        ),
        (None, None) => FixedChoice::Base,
    };

    let output_formats = match raw.output_formats {
        None => vec![OutputFormat::Csv, OutputFormat::Json],
        Some(list) => {
            let mut out = list
                .iter()
                .map(|f| match f.as_str() {
                    "csv" => Ok(OutputFormat::Csv),
                    "json" => Ok(OutputFormat::Json),
                    other => Err(invalid(format!("unknown output format '{other}'"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.sort();
            out.dedup();
            out
        }
    };

    let cfg = ExperimentConfig {
        problem: raw.problem,
        params: raw.params,
        x0: raw.x0,
        simulation,
        fixed,
        strategies,
        c_set: raw.c_set.unwrap_or_else(|| vec![-1.0, 1.0]),
        seed,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("output")),
        output_formats,
    };

    // Building the family checks parameters, c_set and the fixed choice.
    let problem = registry
        .build(&cfg.problem, &cfg.params)
        .map_err(|e| invalid(e.to_string()))?;
    let family =
        RepresentationFamily::generate_full(problem, &cfg.c_set).map_err(|e| invalid(e.to_string()))?;
    cfg.fixed.resolve(&family).map_err(invalid)?;
    Ok(cfg)
}
