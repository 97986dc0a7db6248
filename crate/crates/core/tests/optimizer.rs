mod common;

use std::cell::Cell;

use common::random_linear_problem;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sdre_core::benchmarks::{InvertedPendulum, Lorenz, LorenzParams, PendulumParams};
use sdre_core::linalg::Matrix;
use sdre_core::model::{Coefficients, ControlProblem, PerturbationSpec, RepresentationFamily, Vector};
use sdre_core::optimizer::{
    maybe_skip, minimize_full, minimize_restricted, OptimizerConfig, Strategy,
};
use sdre_core::sdre::assemble_point;

/// Counts `A₀` evaluations; every objective evaluation calls it exactly once.
struct Counting<P> {
    inner: P,
    calls: Cell<usize>,
}

impl<P: ControlProblem> ControlProblem for Counting<P> {
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn state_dim(&self) -> usize {
        self.inner.state_dim()
    }
    fn input_dim(&self) -> usize {
        self.inner.input_dim()
    }
    fn base_rep(&self, x: &Vector) -> Matrix {
        self.calls.set(self.calls.get() + 1);
        self.inner.base_rep(x)
    }
    fn base_rep_jacobian(&self, x: &Vector, k: usize) -> Matrix {
        self.inner.base_rep_jacobian(x, k)
    }
    fn input_map(&self, x: &Vector) -> Matrix {
        self.inner.input_map(x)
    }
    fn input_map_jacobian(&self, x: &Vector, k: usize) -> Matrix {
        self.inner.input_map_jacobian(x, k)
    }
    fn cost_weight(&self) -> &Matrix {
        self.inner.cost_weight()
    }
}

fn lorenz() -> RepresentationFamily<Lorenz> {
    RepresentationFamily::generate_full(Lorenz::new(LorenzParams::default()).unwrap(), &[-1.0, 1.0]).unwrap()
}

fn full_cfg() -> OptimizerConfig {
    OptimizerConfig {
        strategy: Strategy::FullDimensional,
        ..OptimizerConfig::default()
    }
}

#[test]
fn constant_representation_is_always_a_cache_hit() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_linear_problem(&mut rng, 3, 1);
    let x = Vector::from_vec(vec![0.5, -1.0, 2.0]);
    let fam = RepresentationFamily::base_only(p.clone());
    let out = maybe_skip(&fam, &x, &Coefficients::zeros(0), 1e-12).expect("E is identically zero");
    assert!(out.skipped_by_cache);
    assert_eq!(out.evaluations, 1);
    assert_eq!(out.residual_sq, 0.0);
    let out = minimize_full(&fam, &x, &Coefficients::zeros(0), &full_cfg()).unwrap();
    assert_eq!(out.residual_sq, 0.0);
    assert!(out.converged_below_tol);

    // perturbation members make the combination state dependent, but α = 0
    // is still the constant matrix
    let fam = RepresentationFamily::generate_full(p, &[-1.0, 1.0]).unwrap();
    let zeros = Coefficients::zeros(fam.len());
    assert_eq!(maybe_skip(&fam, &x, &zeros, 1e-12).unwrap().residual_sq, 0.0);
    let cfg = OptimizerConfig {
        strategy: Strategy::RestrictedOneDim,
        ..OptimizerConfig::default()
    };
    let out = minimize_restricted(&fam, &x, 1e-12, &cfg).unwrap();
    assert_eq!((out.alpha_star, out.evaluations), (zeros, 1));
}

#[test]
fn lorenz_start_needs_optimization() {
    let fam = lorenz();
    let x = Vector::from_vec(vec![-1.0, -1.0, -1.0]);
    let zeros = Coefficients::zeros(fam.len());
    assert!(maybe_skip(&fam, &x, &zeros, 1e-12).is_none());
    let out = minimize_full(&fam, &x, &Coefficients::ones(fam.len()), &full_cfg()).unwrap();
    assert!(out.residual_sq <= 1e-10, "{}", out.residual_sq);
    let base = assemble_point(&fam, &x, &zeros).unwrap().residual;
    assert!(out.residual_sq < base * base);
}

#[test]
fn reported_evaluations_match_actual_work() {
    let p = Counting {
        inner: Lorenz::new(LorenzParams::default()).unwrap(),
        calls: Cell::new(0),
    };
    let fam = RepresentationFamily::generate_full(p, &[-1.0, 1.0]).unwrap();
    let x = Vector::from_vec(vec![-1.0, 0.5, 2.0]);
    let out = minimize_full(&fam, &x, &Coefficients::ones(fam.len()), &full_cfg()).unwrap();
    assert_eq!(fam.problem().calls.get(), out.evaluations);

    fam.problem().calls.set(0);
    let cfg = OptimizerConfig {
        strategy: Strategy::RestrictedOneDim,
        ..OptimizerConfig::default()
    };
    let out = minimize_restricted(&fam, &x, 1e-12, &cfg).unwrap();
    assert_eq!(fam.problem().calls.get(), out.evaluations);

    fam.problem().calls.set(0);
    let skip = maybe_skip(&fam, &x, &out.alpha_star, 1e-12);
    assert_eq!(fam.problem().calls.get(), 1);
    assert_eq!(skip.is_some(), out.residual_sq <= 1e-12);
}

#[test]
fn searches_are_deterministic() {
    let fam = lorenz();
    let x = Vector::from_vec(vec![1.5, -0.3, 0.8]);
    let cfg = OptimizerConfig {
        restarts: 3,
        seed: 42,
        ..full_cfg()
    };
    let a = minimize_full(&fam, &x, &Coefficients::zeros(fam.len()), &cfg).unwrap();
    let b = minimize_full(&fam, &x, &Coefficients::zeros(fam.len()), &cfg).unwrap();
    assert_eq!(a, b);
    let cfg = OptimizerConfig {
        strategy: Strategy::RestrictedOneDim,
        ..cfg
    };
    let a = minimize_restricted(&fam, &x, 1e-12, &cfg).unwrap();
    let b = minimize_restricted(&fam, &x, 1e-12, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn optimization_never_worsens_the_start() {
    let fam = RepresentationFamily::generate_full(InvertedPendulum::new(PendulumParams::default()).unwrap(), &[-1.0, 1.0])
        .unwrap();
    for x in [[-0.2, -0.2, 0.0, 0.0], [0.5, 0.9, -0.3, 0.2], [0.0, -1.1, 0.4, -0.8]] {
        let x = Vector::from_column_slice(&x);
        let init = Coefficients::zeros(fam.len());
        let start = assemble_point(&fam, &x, &init).unwrap().residual;
        let out = minimize_full(&fam, &x, &init, &full_cfg()).unwrap();
        assert!(out.residual_sq <= start * start);
        let cfg = OptimizerConfig {
            strategy: Strategy::RestrictedOneDim,
            ..OptimizerConfig::default()
        };
        let out = minimize_restricted(&fam, &x, 1e-12, &cfg).unwrap();
        assert!(out.residual_sq <= start * start);
    }
}

/// Scalar nonlinear block `ẋ₁ = x₁³ + u₁` next to a linear oscillator in
/// `(x₂, x₃)` driven by `u₂`. The blocks never couple.
struct SplitProblem {
    q: Matrix,
}

impl ControlProblem for SplitProblem {
    fn name(&self) -> &str {
        "split"
    }
    fn state_dim(&self) -> usize {
        3
    }
    fn input_dim(&self) -> usize {
        2
    }
    fn base_rep(&self, x: &Vector) -> Matrix {
        Matrix::from_row_slice(3, 3, &[x[0] * x[0], 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, -1.0])
    }
    fn base_rep_jacobian(&self, x: &Vector, k: usize) -> Matrix {
        let mut m = Matrix::zeros(3, 3);
        if k == 0 {
            m[(0, 0)] = 2.0 * x[0];
        }
        m
    }
    fn input_map(&self, _x: &Vector) -> Matrix {
        Matrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0])
    }
    fn input_map_jacobian(&self, _x: &Vector, _k: usize) -> Matrix {
        Matrix::zeros(3, 2)
    }
    fn cost_weight(&self) -> &Matrix {
        &self.q
    }
}

#[test]
fn useless_member_leaves_the_residual_unchanged() {
    // the member perturbs row 2 through x₂ and x₃, both zero here, and only
    // touches the block the state does not occupy
    let member = PerturbationSpec::from_one_based(2, 2, 3, 1.0).unwrap();
    let fam = RepresentationFamily::new(SplitProblem { q: Matrix::identity(3, 3) }, vec![member]).unwrap();
    let x = Vector::from_vec(vec![1.0, 0.0, 0.0]);
    let base = assemble_point(&fam, &x, &Coefficients::zeros(1)).unwrap().residual;
    assert!(base * base > 1e-12, "base residual {base}");
    for t in [-3.0, 0.5, 7.0] {
        let e = assemble_point(&fam, &x, &Coefficients::new(vec![t]).unwrap()).unwrap().residual;
        assert!((e - base).abs() <= 1e-12 * base.abs().max(1.0));
    }
    let cfg = OptimizerConfig {
        strategy: Strategy::RestrictedOneDim,
        ..OptimizerConfig::default()
    };
    let out = minimize_restricted(&fam, &x, 1e-12, &cfg).unwrap();
    assert!((out.residual_sq - base * base).abs() <= 1e-12 * (base * base).max(1.0));
    assert!(!out.converged_below_tol);
}

#[test]
fn reported_residual_matches_reevaluation() {
    let fam = lorenz();
    for x in [[-1.0, -1.0, -1.0], [0.4, 1.7, -0.9]] {
        let x = Vector::from_column_slice(&x);
        let out = minimize_full(&fam, &x, &Coefficients::ones(fam.len()), &full_cfg()).unwrap();
        let e = assemble_point(&fam, &x, &out.alpha_star).unwrap().residual;
        assert!((e * e - out.residual_sq).abs() <= 1e-12 * out.residual_sq.max(f64::MIN_POSITIVE));
    }
}
