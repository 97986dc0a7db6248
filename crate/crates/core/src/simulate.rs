//! The closed-loop SDRE simulation: per control step, pick a representation,
//! solve the SDRE, hold the feedback over `dt` and integrate the true
//! dynamics together with the running cost.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{Coefficients, ControlProblem, RepresentationFamily, Vector};
use crate::ode::{integrate, OdeOptions};
use crate::optimizer::{
    maybe_skip, minimize_full, minimize_restricted, InitMode, OptimizeError, OptimizerConfig,
    Strategy,
};
use crate::sdre::assemble_point;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Control update interval in seconds.
    pub dt: f64,
    /// Number of control steps.
    pub n_steps: usize,
    /// Residual-squared threshold for keeping the previous coefficients.
    pub residual_tol: f64,
    pub optimizer: OptimizerConfig,
    pub integrator_rel_tol: f64,
    pub integrator_abs_tol: f64,
    /// Sup-norm beyond which the run counts as diverged.
    pub divergence_norm: f64,
    /// Sup-norm below which the run stops as settled.
    pub settle_norm: f64,
    /// Coefficients used by [`Strategy::FixedAlpha`]; zeros when `None`.
    pub fixed_alpha: Option<Coefficients>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            n_steps: 1000,
            residual_tol: 1e-12,
            optimizer: OptimizerConfig::default(),
            integrator_rel_tol: 1e-8,
            integrator_abs_tol: 1e-10,
            divergence_norm: 1e4,
            settle_norm: 1e-6,
            fixed_alpha: None,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), SimulationError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.dt) {
            return Err(SimulationError::InvalidConfig("dt must be positive"));
        }
        if self.n_steps == 0 {
            return Err(SimulationError::InvalidConfig("n_steps must be at least 1"));
        }
        if !positive(self.residual_tol) {
            return Err(SimulationError::InvalidConfig("residual_tol must be positive"));
        }
        if !positive(self.integrator_rel_tol) || !positive(self.integrator_abs_tol) {
            return Err(SimulationError::InvalidConfig("integrator tolerances must be positive"));
        }
        if !(self.settle_norm >= 0.0) || !(self.divergence_norm > self.settle_norm) {
            return Err(SimulationError::InvalidConfig(
                "divergence_norm must exceed settle_norm",
            ));
        }
        self.optimizer
            .validate()
            .map_err(|_| SimulationError::InvalidConfig("invalid optimizer settings"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimulationError {
    DimensionMismatch,
    InvalidConfig(&'static str),
}

impl fmt::Display for SimulationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimulationError::DimensionMismatch => {
                f.write_str("initial state or coefficients have the wrong dimension")
            }
            SimulationError::InvalidConfig(why) => write!(f, "invalid simulation config: {why}"),
        }
    }
}

impl core::error::Error for SimulationError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    /// The state reached the settle norm.
    Settled,
    /// All control steps ran without settling.
    HorizonReached,
    /// The state blew up or the integrator broke down at `t`.
    Diverged { t: f64 },
    /// No stabilizing Riccati solution existed at `t`.
    CareFailure { t: f64 },
}

impl RunStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RunStatus::Settled => "Settled",
            RunStatus::HorizonReached => "HorizonReached",
            RunStatus::Diverged { .. } => "Diverged",
            RunStatus::CareFailure { .. } => "CareFailure",
        }
    }

    pub fn failure_time(&self) -> Option<f64> {
        match *self {
            RunStatus::Diverged { t } | RunStatus::CareFailure { t } => Some(t),
            _ => None,
        }
    }

    pub fn is_failure(&self) -> bool {
        self.failure_time().is_some()
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.failure_time() {
            Some(t) => write!(f, "{}(t={t})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

/// History of one closed-loop run, one row per control step.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub label: String,
    pub problem: String,
    pub strategy: Strategy,
    pub x0: Vec<f64>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
    pub alphas: Vec<Vec<f64>>,
    /// `E(yⁱ, αᵢ*)²`
    pub residuals_sq: Vec<f64>,
    pub cache_hits: Vec<bool>,
    /// Cost accumulated up to each recorded time.
    pub running_cost: Vec<f64>,
    pub total_cost: f64,
    /// Trapezoidal `∫E² dt` over the recorded steps.
    pub total_residual: f64,
    pub status: RunStatus,
    /// Seconds spent in the simulation loop.
    pub wall_time: f64,
    /// Objective evaluations, each one Riccati plus d Lyapunov solves.
    pub evaluation_count: usize,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }
}

/// Monotonic time source in seconds.
pub trait Clock {
    fn now(&self) -> f64;
}

/// Clock that always reads zero, for builds without a time source.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

pub fn run<P: ControlProblem>(
    family: &RepresentationFamily<P>,
    x0: &[f64],
    cfg: &SimulationConfig,
) -> Result<TrajectoryRecord, SimulationError> {
    run_with_clock(family, x0, cfg, &NoClock)
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn run_with_clock<P: ControlProblem, C: Clock + ?Sized>(
    family: &RepresentationFamily<P>,
    x0: &[f64],
    cfg: &SimulationConfig,
    clock: &C,
) -> Result<TrajectoryRecord, SimulationError> {
    cfg.validate()?;
    let problem = family.problem();
    let d = problem.state_dim();
    let n = family.len();
    if x0.len() != d || x0.iter().any(|v| !v.is_finite()) {
        return Err(SimulationError::DimensionMismatch);
    }
    let fixed = match &cfg.fixed_alpha {
        Some(a) if a.len() != n => return Err(SimulationError::DimensionMismatch),
        Some(a) => a.clone(),
        None => Coefficients::zeros(n),
    };
    let strategy = cfg.optimizer.strategy;
    let opt_cfg = OptimizerConfig {
        tol: cfg.residual_tol,
        ..cfg.optimizer.clone()
    };
    let q = problem.cost_weight();
    let ode_opts = OdeOptions {
        rel_tol: cfg.integrator_rel_tol,
        abs_tol: cfg.integrator_abs_tol,
        ..OdeOptions::default()
    };

    let mut rec = TrajectoryRecord {
        label: String::from(strategy.name()),
        problem: String::from(problem.name()),
        strategy,
        x0: x0.to_vec(),
        times: Vec::new(),
        states: Vec::new(),
        controls: Vec::new(),
        alphas: Vec::new(),
        residuals_sq: Vec::new(),
        cache_hits: Vec::new(),
        running_cost: Vec::new(),
        total_cost: 0.0,
        total_residual: 0.0,
        status: RunStatus::HorizonReached,
        wall_time: 0.0,
        evaluation_count: 0,
    };

    let start = clock.now();
    let mut y = x0.to_vec();
    let mut cost = 0.0;
    let mut prev: Option<Coefficients> = None;
    let mut aug = vec![0.0; d + 1];

    for step in 0..=cfg.n_steps {
        let t = step as f64 * cfg.dt;
        let x = Vector::from_column_slice(&y);

        let mut hit = false;
        let alpha = match strategy {
            Strategy::FixedAlpha => fixed.clone(),
            Strategy::FullDimensional | Strategy::RestrictedOneDim => {
                let cached = prev.as_ref().and_then(|p| {
                    rec.evaluation_count += 1;
                    maybe_skip(family, &x, p, cfg.residual_tol)
                });
                if let Some(out) = cached {
                    hit = true;
                    out.alpha_star
                } else {
                    let found = if strategy == Strategy::FullDimensional {
                        let init = match (opt_cfg.init_mode, &prev) {
                            (InitMode::WarmStart, Some(p)) => p.clone(),
                            (InitMode::WarmStart | InitMode::PaperOnes, _) => {
                                Coefficients::ones(n)
                            }
                            (InitMode::Zeros, _) => Coefficients::zeros(n),
                        };
                        minimize_full(family, &x, &init, &opt_cfg)
                    } else {
                        minimize_restricted(family, &x, cfg.residual_tol, &opt_cfg)
                    };
                    match found {
                        Ok(out) => {
                            rec.evaluation_count += out.evaluations;
                            out.alpha_star
                        }
                        Err(OptimizeError::AllEvaluationsFailed) => {
                            rec.status = RunStatus::CareFailure { t };
                            break;
                        }
                        Err(_) => return Err(SimulationError::InvalidConfig("optimizer")),
                    }
                }
            }
        };

        rec.evaluation_count += 1;
        let point = match assemble_point(family, &x, &alpha) {
            Ok(p) => p,
            Err(_) => {
                rec.status = RunStatus::CareFailure { t };
                break;
            }
        };
        let u: Vec<f64> = point.control.iter().copied().collect();

        rec.times.push(t);
        rec.states.push(y.clone());
        rec.controls.push(u.clone());
        rec.alphas.push(alpha.as_slice().to_vec());
        rec.residuals_sq.push(point.residual * point.residual);
        rec.cache_hits.push(hit);
        rec.running_cost.push(cost);
        prev = Some(alpha);

        if sup_norm(&y) <= cfg.settle_norm {
            rec.status = RunStatus::Settled;
            break;
        }
        if step == cfg.n_steps {
            rec.status = RunStatus::HorizonReached;
            break;
        }

        aug[..d].copy_from_slice(&y);
        aug[d] = cost;
        let uv = Vector::from_column_slice(&u);
        let control_cost = 0.5 * uv.dot(&uv);
        let rhs = |_t: f64, s: &[f64], ds: &mut [f64]| {
            let ys = Vector::from_column_slice(&s[..d]);
            let f = problem.drift(&ys) + problem.input_map(&ys) * &uv;
            ds[..d].copy_from_slice(f.as_slice());
            ds[d] = 0.5 * ys.dot(&(q * &ys)) + control_cost;
        };
        let t_next = t + cfg.dt;
        if let Err(e) = integrate(rhs, t, t_next, &mut aug, &ode_opts, |_, _| {}) {
            rec.status = RunStatus::Diverged { t: e.time() };
            break;
        }
        y.copy_from_slice(&aug[..d]);
        cost = aug[d];
        if !y.iter().all(|v| v.is_finite()) || sup_norm(&y) > cfg.divergence_norm {
            rec.status = RunStatus::Diverged { t: t_next };
            break;
        }
    }

    rec.wall_time = (clock.now() - start).max(0.0);
    rec.total_cost = rec.running_cost.last().copied().unwrap_or(0.0);
    rec.total_residual = rec
        .times
        .windows(2)
        .zip(rec.residuals_sq.windows(2))
        .map(|(t, e)| 0.5 * (t[1] - t[0]) * (e[0] + e[1]))
        .sum();
    Ok(rec)
}

/// `(t, E²)` pairs for log-scale plotting.
pub fn residual_trace(record: &TrajectoryRecord) -> Vec<(f64, f64)> {
    record
        .times
        .iter()
        .copied()
        .zip(record.residuals_sq.iter().copied())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub strategy: Strategy,
    pub total_cost: f64,
    pub total_residual: f64,
    pub wall_time: f64,
    pub evaluation_count: usize,
    pub status: RunStatus,
    /// `(J_ref − J)/J_ref` against the first record.
    pub cost_improvement: f64,
    /// Wall time relative to the first record.
    pub slowdown: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub problem: String,
    pub x0: Vec<f64>,
    pub rows: Vec<ComparisonRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareError {
    TooFewRecords,
    /// Records differ in problem or initial state.
    MismatchedScenarios,
}

impl fmt::Display for CompareError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareError::TooFewRecords => "need at least two records to compare",
            CompareError::MismatchedScenarios => "records come from different scenarios",
        })
    }
}

impl core::error::Error for CompareError {}

fn ratio(value: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        value / reference
    } else if value == reference {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Tabulates records against the first one.
pub fn compare_runs(records: &[TrajectoryRecord]) -> Result<Comparison, CompareError> {
    let [base, rest @ ..] = records else {
        return Err(CompareError::TooFewRecords);
    };
    if rest.is_empty() {
        return Err(CompareError::TooFewRecords);
    }
    if rest
        .iter()
        .any(|r| r.problem != base.problem || r.x0 != base.x0)
    {
        return Err(CompareError::MismatchedScenarios);
    }
    let rows = records
        .iter()
        .map(|r| ComparisonRow {
            label: r.label.clone(),
            strategy: r.strategy,
            total_cost: r.total_cost,
            total_residual: r.total_residual,
            wall_time: r.wall_time,
            evaluation_count: r.evaluation_count,
            status: r.status,
            cost_improvement: if base.total_cost != 0.0 {
                (base.total_cost - r.total_cost) / base.total_cost
            } else {
                0.0
            },
            slowdown: ratio(r.wall_time, base.wall_time),
        })
        .collect();
    Ok(Comparison {
        problem: base.problem.clone(),
        x0: base.x0.clone(),
        rows,
    })
}
