//! Minimization of `E(x, α)²` over the reduced coefficients `α` at a fixed
//! state, either over all of `ℝᴺ` or along one coordinate axis at a time.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Coefficients, ControlProblem, RepresentationFamily, Vector};
use crate::sdre::assemble_point;

/// Objective value reported for coefficients where the SDRE has no
/// stabilizing solution.
pub const FAILURE_PENALTY: f64 = 1e12;
/// Searches stop once the objective reaches this value.
const VALUE_FLOOR: f64 = 1e-30;
/// Full searches stop once the objective is this far below `tol`, leaving
/// margin for the cached coefficients at the next steps.
const STOP_FRACTION: f64 = 1e-4;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;
const GOLDEN: f64 = 0.618_033_988_749_894_8;
const BRACKET_DOUBLINGS: usize = 5;
const SECANT_ITERS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Keep one representation for the whole run.
    FixedAlpha,
    /// Quasi-Newton search over all N coefficients.
    FullDimensional,
    /// One-dimensional searches along `eᵢ`, first axis under `tol` wins.
    RestrictedOneDim,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::FixedAlpha,
        Strategy::FullDimensional,
        Strategy::RestrictedOneDim,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::FixedAlpha => "fixed",
            Strategy::FullDimensional => "full",
            Strategy::RestrictedOneDim => "restricted",
        }
    }

    /// Accepts the short names and the enum spellings.
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "fixed" | "FixedAlpha" => Some(Strategy::FixedAlpha),
            "full" | "FullDimensional" => Some(Strategy::FullDimensional),
            "restricted" | "RestrictedOneDim" => Some(Strategy::RestrictedOneDim),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// Previous step's minimizer; all-ones on the first step.
    WarmStart,
    /// All-ones in the reduced space at every step.
    PaperOnes,
    Zeros,
}

impl InitMode {
    pub fn name(&self) -> &'static str {
        match self {
            InitMode::WarmStart => "warm-start",
            InitMode::PaperOnes => "ones",
            InitMode::Zeros => "zeros",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "warm-start" | "WarmStart" => Some(InitMode::WarmStart),
            "ones" | "PaperOnes" => Some(InitMode::PaperOnes),
            "zeros" | "Zeros" => Some(InitMode::Zeros),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub strategy: Strategy,
    /// Residual-squared threshold.
    pub tol: f64,
    /// Iteration cap per search.
    pub max_iters: usize,
    /// Relative finite-difference step for gradients.
    pub grad_step: f64,
    pub init_mode: InitMode,
    /// Initial half-width of the one-dimensional bracket.
    pub line_search_bracket: f64,
    /// Random restarts when a full search ends above `tol`.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::FullDimensional,
            tol: 1e-12,
            max_iters: 200,
            grad_step: 1e-6,
            init_mode: InitMode::WarmStart,
            line_search_bracket: 2.0,
            restarts: 1,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let ok = self.tol > 0.0
            && self.grad_step > 0.0
            && self.line_search_bracket > 0.0
            && self.max_iters > 0
            && self.tol.is_finite()
            && self.grad_step.is_finite()
            && self.line_search_bracket.is_finite();
        if ok {
            Ok(())
        } else {
            Err(OptimizeError::InvalidConfig)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome {
    pub alpha_star: Coefficients,
    /// `E(x, α*)²`
    pub residual_sq: f64,
    /// Objective evaluations spent, each one Riccati plus d Lyapunov solves.
    pub evaluations: usize,
    pub converged_below_tol: bool,
    pub skipped_by_cache: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeError {
    /// No trial coefficient vector admitted a stabilizing Riccati solution.
    AllEvaluationsFailed,
    DimensionMismatch,
    InvalidConfig,
}

impl fmt::Display for OptimizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptimizeError::AllEvaluationsFailed => "every objective evaluation failed",
            OptimizeError::DimensionMismatch => "coefficient vector has the wrong length",
            OptimizeError::InvalidConfig => "invalid optimizer configuration",
        })
    }
}

impl core::error::Error for OptimizeError {}

/// One objective evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    /// Objective value; [`FAILURE_PENALTY`] when infeasible.
    pub value: f64,
    /// Signed residual whose square is `value`, when the objective has one.
    pub residual: Option<f64>,
    pub feasible: bool,
}

impl Trial {
    pub fn infeasible() -> Self {
        Self {
            value: FAILURE_PENALTY,
            residual: None,
            feasible: false,
        }
    }
}

/// Something the searches can minimize. Implementations count their own
/// evaluations.
pub trait Objective {
    fn dim(&self) -> usize;
    fn evaluate(&mut self, alpha: &[f64]) -> Trial;
    fn evaluations(&self) -> usize;
}

/// `α ↦ E(x, α)²` at a fixed state.
pub struct ResidualObjective<'a, P> {
    family: &'a RepresentationFamily<P>,
    state: &'a Vector,
    count: usize,
}

impl<'a, P: ControlProblem> ResidualObjective<'a, P> {
    pub fn new(family: &'a RepresentationFamily<P>, state: &'a Vector) -> Self {
        Self {
            family,
            state,
            count: 0,
        }
    }
}

impl<P: ControlProblem> Objective for ResidualObjective<'_, P> {
    fn dim(&self) -> usize {
        self.family.len()
    }

    fn evaluate(&mut self, alpha: &[f64]) -> Trial {
        self.count += 1;
        let Ok(coeffs) = Coefficients::new(alpha.to_vec()) else {
            return Trial::infeasible();
        };
        match assemble_point(self.family, self.state, &coeffs) {
            Ok(p) if p.residual.is_finite() => Trial {
                value: p.residual * p.residual,
                residual: Some(p.residual),
                feasible: true,
            },
            _ => Trial::infeasible(),
        }
    }

    fn evaluations(&self) -> usize {
        self.count
    }
}

/// Keeps `α_prev` when `E(x, α_prev)² ≤ tol`. Always costs one evaluation;
/// a failed evaluation is a miss.
pub fn maybe_skip<P: ControlProblem>(
    family: &RepresentationFamily<P>,
    x: &Vector,
    alpha_prev: &Coefficients,
    tol: f64,
) -> Option<OptimizeOutcome> {
    if alpha_prev.len() != family.len() {
        return None;
    }
    let mut obj = ResidualObjective::new(family, x);
    let trial = obj.evaluate(alpha_prev.as_slice());
    (trial.feasible && trial.value <= tol).then(|| OptimizeOutcome {
        alpha_star: alpha_prev.clone(),
        residual_sq: trial.value,
        evaluations: obj.evaluations(),
        converged_below_tol: true,
        skipped_by_cache: true,
    })
}

/// Quasi-Newton minimization of `E(x, α)²` over `ℝᴺ` from `alpha_init`.
pub fn minimize_full<P: ControlProblem>(
    family: &RepresentationFamily<P>,
    x: &Vector,
    alpha_init: &Coefficients,
    cfg: &OptimizerConfig,
) -> Result<OptimizeOutcome, OptimizeError> {
    let mut obj = ResidualObjective::new(family, x);
    minimize_objective(&mut obj, alpha_init, cfg)
}

/// One-dimensional searches along each axis until `E(x, t·eᵢ)² ≤ tol`.
pub fn minimize_restricted<P: ControlProblem>(
    family: &RepresentationFamily<P>,
    x: &Vector,
    tol: f64,
    cfg: &OptimizerConfig,
) -> Result<OptimizeOutcome, OptimizeError> {
    let mut obj = ResidualObjective::new(family, x);
    restricted_search(&mut obj, tol, cfg)
}

#[derive(Debug, Clone)]
struct Point {
    x: Vec<f64>,
    trial: Trial,
}

impl Point {
    fn better_than(&self, other: &Point) -> bool {
        match (self.trial.feasible, other.trial.feasible) {
            (true, false) => true,
            (false, _) => false,
            (true, true) => self.trial.value < other.trial.value,
        }
    }
}

fn outcome<O: Objective>(obj: &O, best: Point, tol: f64) -> Result<OptimizeOutcome, OptimizeError> {
    if !best.trial.feasible {
        return Err(OptimizeError::AllEvaluationsFailed);
    }
    Ok(OptimizeOutcome {
        alpha_star: Coefficients::new(best.x).map_err(|_| OptimizeError::AllEvaluationsFailed)?,
        residual_sq: best.trial.value,
        evaluations: obj.evaluations(),
        converged_below_tol: best.trial.value <= tol,
        skipped_by_cache: false,
    })
}

/// Full-dimensional search on any [`Objective`].
///
/// Falls back to `α = 0` and then to seeded random starts if `alpha_init`
/// is infeasible, and spends `cfg.restarts` extra random starts when the
/// search stalls above `cfg.tol`.
pub fn minimize_objective<O: Objective>(
    obj: &mut O,
    alpha_init: &Coefficients,
    cfg: &OptimizerConfig,
) -> Result<OptimizeOutcome, OptimizeError> {
    cfg.validate()?;
    let n = obj.dim();
    if alpha_init.len() != n {
        return Err(OptimizeError::DimensionMismatch);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let random_start = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        alpha_init
            .as_slice()
            .iter()
            .map(|a| a + rng.random_range(-1.0..1.0))
            .collect()
    };

    let init = alpha_init.as_slice().to_vec();
    let first = obj.evaluate(&init);
    let mut best = Point {
        x: init.clone(),
        trial: first,
    };
    let mut start = first.feasible.then(|| best.clone());

    if start.is_none() && init.iter().any(|v| *v != 0.0) {
        let zeros = vec![0.0; n];
        let t = obj.evaluate(&zeros);
        if t.feasible {
            start = Some(Point { x: zeros, trial: t });
        }
    }
    let mut fallback_tries = cfg.restarts.max(1);
    while start.is_none() && fallback_tries > 0 {
        fallback_tries -= 1;
        let x = random_start(&mut rng);
        let t = obj.evaluate(&x);
        if t.feasible {
            start = Some(Point { x, trial: t });
        }
    }
    let Some(start) = start else {
        return Err(OptimizeError::AllEvaluationsFailed);
    };

    let found = quasi_newton(obj, start, cfg);
    if found.better_than(&best) {
        best = found;
    }
    for _ in 0..cfg.restarts {
        if best.trial.value <= cfg.tol {
            break;
        }
        let x = random_start(&mut rng);
        let t = obj.evaluate(&x);
        if !t.feasible {
            continue;
        }
        let found = quasi_newton(obj, Point { x, trial: t }, cfg);
        if found.better_than(&best) {
            best = found;
        }
    }
    outcome(obj, best, cfg.tol)
}

struct Gradient {
    /// Gradient of the objective value.
    value: Vec<f64>,
    /// Gradient of the signed residual, when every difference had one.
    residual: Option<Vec<f64>>,
}

/// Forward differences (backward where the forward trial is infeasible).
/// With a residual available the value gradient is `2E∇E`.
fn gradient<O: Objective>(obj: &mut O, at: &Point, rel_step: f64) -> Gradient {
    let n = at.x.len();
    let mut value = vec![0.0; n];
    let mut residual = at.trial.residual.map(|_| vec![0.0; n]);
    let mut probe = at.x.clone();
    for i in 0..n {
        let h = rel_step * at.x[i].abs().max(1.0);
        let mut diff = None;
        for step in [h, -h] {
            probe[i] = at.x[i] + step;
            let t = obj.evaluate(&probe);
            probe[i] = at.x[i];
            if t.feasible {
                diff = Some((t, step));
                break;
            }
        }
        match (diff, at.trial.residual) {
            (Some((t, step)), Some(e0)) => match (t.residual, residual.as_mut()) {
                (Some(e1), Some(r)) => {
                    r[i] = (e1 - e0) / step;
                    value[i] = 2.0 * e0 * r[i];
                }
                _ => {
                    residual = None;
                    value[i] = (t.value - at.trial.value) / step;
                }
            },
            (Some((t, step)), None) => value[i] = (t.value - at.trial.value) / step,
            (None, _) => {}
        }
    }
    Gradient { value, residual }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(x: &[f64], t: f64, p: &[f64]) -> Vec<f64> {
    x.iter().zip(p).map(|(a, b)| a + t * b).collect()
}

/// BFGS on the objective value with a backtracking Armijo line search.
///
/// When the objective is a squared scalar residual, each iteration first
/// tries the minimum-norm Newton step `−E∇E/|∇E|²` for `E = 0`, which
/// converges quadratically onto the zero set where plain BFGS on `E²`
/// would stall at the finite-difference noise floor.
fn quasi_newton<O: Objective>(obj: &mut O, start: Point, cfg: &OptimizerConfig) -> Point {
    let n = start.x.len();
    let mut cur = start;
    let floor = VALUE_FLOOR.max(cfg.tol * STOP_FRACTION);
    if n == 0 || cur.trial.value <= floor {
        return cur;
    }
    let mut inv_h = identity(n);
    let mut scaled = false;
    let mut grad = gradient(obj, &cur, cfg.grad_step);

    for _ in 0..cfg.max_iters {
        if cur.trial.value <= floor || grad.value.iter().all(|g| *g == 0.0) {
            break;
        }
        let mut next: Option<Point> = None;

        if let (Some(e), Some(ge)) = (cur.trial.residual, grad.residual.as_ref()) {
            let gg = dot(ge, ge);
            if gg > 0.0 {
                let p: Vec<f64> = ge.iter().map(|g| -e * g / gg).collect();
                let mut t = 1.0;
                for _ in 0..4 {
                    let x = axpy(&cur.x, t, &p);
                    let trial = obj.evaluate(&x);
                    if trial.feasible && trial.value < (1.0 - ARMIJO) * cur.trial.value {
                        next = Some(Point { x, trial });
                        break;
                    }
                    t *= 0.5;
                }
            }
        }

        if next.is_none() {
            let mut p = mat_vec(&inv_h, &grad.value);
            p.iter_mut().for_each(|v| *v = -*v);
            let mut slope = dot(&grad.value, &p);
            if !(slope < 0.0) {
                inv_h = identity(n);
                p = grad.value.iter().map(|g| -g).collect();
                slope = -dot(&grad.value, &grad.value);
            }
            let mut t = 1.0;
            for _ in 0..MAX_BACKTRACKS {
                let x = axpy(&cur.x, t, &p);
                let trial = obj.evaluate(&x);
                if trial.feasible && trial.value <= cur.trial.value + ARMIJO * t * slope {
                    next = Some(Point { x, trial });
                    break;
                }
                t *= 0.5;
            }
        }

        let Some(next) = next else {
            break;
        };
        let next_grad = gradient(obj, &next, cfg.grad_step);
        let s: Vec<f64> = next.x.iter().zip(&cur.x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = next_grad
            .value
            .iter()
            .zip(&grad.value)
            .map(|(a, b)| a - b)
            .collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 * libm::sqrt(dot(&s, &s) * dot(&y, &y)) && sy > 0.0 {
            if !scaled {
                let gamma = sy / dot(&y, &y);
                inv_h.iter_mut().for_each(|v| *v *= gamma);
                scaled = true;
            }
            bfgs_update(&mut inv_h, &s, &y, sy);
        }
        let stalled = next.trial.value >= cur.trial.value * (1.0 - 1e-12);
        cur = next;
        grad = next_grad;
        if stalled {
            break;
        }
    }
    cur
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| dot(&m[i * n..(i + 1) * n], v)).collect()
}

/// `H ← (I − ρsyᵀ)H(I − ρysᵀ) + ρssᵀ`, `ρ = 1/sᵀy`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j])
                + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// Axis-by-axis search on any [`Objective`]; the lowest axis reaching `tol`
/// wins, otherwise the best point seen is returned.
pub fn restricted_search<O: Objective>(
    obj: &mut O,
    tol: f64,
    cfg: &OptimizerConfig,
) -> Result<OptimizeOutcome, OptimizeError> {
    cfg.validate()?;
    let n = obj.dim();
    let zeros = vec![0.0; n];
    let base = obj.evaluate(&zeros);
    let mut best = Point {
        x: zeros,
        trial: base,
    };
    if base.feasible && base.value <= tol {
        return outcome(obj, best, tol);
    }
    for axis in 0..n {
        let found = axis_search(obj, axis, base, tol, cfg);
        if found.better_than(&best) {
            best = found;
        }
        if best.trial.feasible && best.trial.value <= tol {
            break;
        }
    }
    outcome(obj, best, tol)
}

fn axis_point(n: usize, axis: usize, t: f64) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[axis] = t;
    x
}

/// Golden section on `[−w, w]`, doubling `w` while the minimizer sits on
/// the bracket edge, followed by secant refinement of the residual root.
fn axis_search<O: Objective>(
    obj: &mut O,
    axis: usize,
    at_zero: Trial,
    tol: f64,
    cfg: &OptimizerConfig,
) -> Point {
    let n = obj.dim();
    let mut best_t = 0.0;
    let mut best = at_zero;
    let consider = |t: f64, trial: Trial, best_t: &mut f64, best: &mut Trial| {
        let cand = Point {
            x: Vec::new(),
            trial,
        };
        let cur = Point {
            x: Vec::new(),
            trial: *best,
        };
        if cand.better_than(&cur) {
            *best_t = t;
            *best = trial;
        }
    };

    let mut half = cfg.line_search_bracket;
    for _ in 0..BRACKET_DOUBLINGS {
        let (t, trial) = golden_section(obj, axis, -half, half, cfg.max_iters);
        consider(t, trial, &mut best_t, &mut best);
        if best.feasible && best.value > tol {
            if let Some((t2, trial2)) = secant_refine(obj, axis, best_t, best, half) {
                consider(t2, trial2, &mut best_t, &mut best);
            }
        }
        if best.feasible && best.value <= tol {
            break;
        }
        if t.abs() < 0.95 * half {
            break;
        }
        half *= 2.0;
    }
    Point {
        x: axis_point(n, axis, best_t),
        trial: best,
    }
}

fn golden_section<O: Objective>(
    obj: &mut O,
    axis: usize,
    lo: f64,
    hi: f64,
    max_iters: usize,
) -> (f64, Trial) {
    let n = obj.dim();
    let eval = |obj: &mut O, t: f64| obj.evaluate(&axis_point(n, axis, t));
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = eval(obj, c);
    let mut fd = eval(obj, d);
    let width_tol = 1e-8 * (hi - lo).abs().max(1.0);
    let mut iters = 0;
    while (b - a).abs() > width_tol && iters < max_iters {
        iters += 1;
        if fc.value < fd.value {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = eval(obj, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = eval(obj, d);
        }
    }
    if fc.value <= fd.value {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Secant iteration for `E(t·eᵢ) = 0` started at `t0`.
fn secant_refine<O: Objective>(
    obj: &mut O,
    axis: usize,
    t0: f64,
    f0: Trial,
    half: f64,
) -> Option<(f64, Trial)> {
    let n = obj.dim();
    let mut e0 = f0.residual?;
    let mut ta = t0;
    let mut tb = t0 + 1e-4 * t0.abs().max(1.0);
    let fb = obj.evaluate(&axis_point(n, axis, tb));
    let mut e1 = fb.residual?;
    let mut best: Option<(f64, Trial)> = None;
    if fb.value < f0.value {
        best = Some((tb, fb));
    }
    let mut worse = 0;
    for _ in 0..SECANT_ITERS {
        if e1 == e0 {
            break;
        }
        let tc = tb - e1 * (tb - ta) / (e1 - e0);
        if !tc.is_finite() || (tc - t0).abs() > 4.0 * half {
            break;
        }
        let fc = obj.evaluate(&axis_point(n, axis, tc));
        let Some(ec) = fc.residual else {
            break;
        };
        let best_value = best.map_or(f0.value, |b| b.1.value);
        if fc.value < best_value {
            best = Some((tc, fc));
            worse = 0;
        } else {
            worse += 1;
            if worse >= 3 {
                break;
            }
        }
        if fc.value <= VALUE_FLOOR {
            break;
        }
        ta = tb;
        e0 = e1;
        tb = tc;
        e1 = ec;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `½(α − c)ᵀH(α − c)` with no residual.
    struct Quadratic {
        h: Vec<f64>,
        center: Vec<f64>,
        count: usize,
    }

    impl Objective for Quadratic {
        fn dim(&self) -> usize {
            self.center.len()
        }
        fn evaluate(&mut self, alpha: &[f64]) -> Trial {
            self.count += 1;
            let d: Vec<f64> = alpha.iter().zip(&self.center).map(|(a, c)| a - c).collect();
            Trial {
                value: 0.5 * dot(&d, &mat_vec(&self.h, &d)),
                residual: None,
                feasible: true,
            }
        }
        fn evaluations(&self) -> usize {
            self.count
        }
    }

    /// Scalar residual `E(α) = aᵀα + ½|α|² − b`, infeasible when `α₀ > wall`.
    struct Residual {
        a: Vec<f64>,
        b: f64,
        wall: f64,
        count: usize,
    }

    impl Objective for Residual {
        fn dim(&self) -> usize {
            self.a.len()
        }
        fn evaluate(&mut self, alpha: &[f64]) -> Trial {
            self.count += 1;
            if alpha[0] > self.wall {
                return Trial::infeasible();
            }
            let e = dot(&self.a, alpha) + 0.5 * dot(alpha, alpha) - self.b;
            Trial {
                value: e * e,
                residual: Some(e),
                feasible: true,
            }
        }
        fn evaluations(&self) -> usize {
            self.count
        }
    }

    #[test]
    fn quadratic_surrogate_converges() {
        let h = vec![
            4.0, 1.0, 0.0, 0.0, //
            1.0, 3.0, 0.5, 0.0, //
            0.0, 0.5, 2.0, 0.2, //
            0.0, 0.0, 0.2, 1.0,
        ];
        let center = vec![0.3, -1.2, 2.0, 0.7];
        let mut q = Quadratic {
            h,
            center: center.clone(),
            count: 0,
        };
        let cfg = OptimizerConfig {
            grad_step: 1e-9,
            tol: 1e-24,
            max_iters: 50,
            restarts: 0,
            ..Default::default()
        };
        let out = minimize_objective(&mut q, &Coefficients::ones(4), &cfg).unwrap();
        for (a, c) in out.alpha_star.as_slice().iter().zip(&center) {
            assert!((a - c).abs() < 1e-8, "{:?}", out.alpha_star);
        }
    }

    #[test]
    fn residual_root_found() {
        let mut r = Residual {
            a: vec![1.0, -2.0, 0.5],
            b: 3.0,
            wall: f64::INFINITY,
            count: 0,
        };
        let out = minimize_objective(&mut r, &Coefficients::ones(3), &OptimizerConfig::default())
            .unwrap();
        assert!(out.residual_sq < 1e-24, "{out:?}");
        assert!(out.converged_below_tol);
        assert_eq!(out.evaluations, r.count);
    }

    #[test]
    fn infeasible_start_falls_back() {
        let mut r = Residual {
            a: vec![1.0, 1.0],
            b: 0.5,
            wall: 0.5,
            count: 0,
        };
        let out = minimize_objective(&mut r, &Coefficients::ones(2), &OptimizerConfig::default())
            .unwrap();
        assert!(out.alpha_star.as_slice()[0] <= 0.5);
        assert!(out.residual_sq < 1e-20);
    }

    #[test]
    fn everything_infeasible() {
        let mut r = Residual {
            a: vec![1.0],
            b: 0.5,
            wall: f64::NEG_INFINITY,
            count: 0,
        };
        let cfg = OptimizerConfig::default();
        assert_eq!(
            minimize_objective(&mut r, &Coefficients::ones(1), &cfg),
            Err(OptimizeError::AllEvaluationsFailed)
        );
        let mut r = Residual {
            a: vec![1.0],
            b: 0.5,
            wall: f64::NEG_INFINITY,
            count: 0,
        };
        assert_eq!(
            restricted_search(&mut r, 1e-9, &cfg),
            Err(OptimizeError::AllEvaluationsFailed)
        );
    }

    #[test]
    fn restricted_picks_first_sufficient_axis() {
        // E = t²/2 + 1 and t + t²/2 + 1 have no root, 3t + t²/2 + 1 does
        let mut r = Residual {
            a: vec![0.0, 1.0, 3.0],
            b: -1.0,
            wall: f64::INFINITY,
            count: 0,
        };
        let out = restricted_search(&mut r, 1e-12, &OptimizerConfig::default()).unwrap();
        let a = out.alpha_star.as_slice();
        assert_eq!(a[0], 0.0);
        assert_eq!(a[1], 0.0);
        assert!(a[2] != 0.0);
        assert!(out.residual_sq <= 1e-12);
        assert_eq!(a.iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn restricted_expands_bracket() {
        // E = t + t²/2 − 220 has its root at t = 20
        let mut r = Residual {
            a: vec![1.0],
            b: 20.0 + 200.0,
            wall: f64::INFINITY,
            count: 0,
        };
        let out = restricted_search(&mut r, 1e-12, &OptimizerConfig::default()).unwrap();
        assert!(out.residual_sq <= 1e-12, "{out:?}");
    }

    #[test]
    fn config_validation() {
        let cfg = OptimizerConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert_eq!(cfg.validate(), Err(OptimizeError::InvalidConfig));
        for s in Strategy::ALL {
            assert_eq!(Strategy::from_name(s.name()), Some(s));
        }
    }
}
