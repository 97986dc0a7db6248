//! Independent oracles and instance generators shared by the integration
//! tests and the acceptance suite.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sdre_core::linalg::{is_stabilizable, solve_care, spectral_report, Matrix};
use sdre_core::model::{Coefficients, ControlProblem, LinearProblem, RepresentationFamily, Vector};

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, range: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-range..range))
}

/// Dense `vec`-form solve of `FᵀX + XF + C = 0`.
pub fn kronecker_lyapunov(f: &Matrix, c: &Matrix) -> Matrix {
    let n = f.nrows();
    let ft = f.transpose();
    let mut k = DMatrix::<f64>::zeros(n * n, n * n);
    // column-major vec: vec(FᵀX) = (I ⊗ Fᵀ) vec X, vec(XF) = (Fᵀ ⊗ I) vec X
    for j in 0..n {
        for i in 0..n {
            let row = j * n + i;
            for p in 0..n {
                k[(row, j * n + p)] += ft[(i, p)];
                k[(row, p * n + i)] += f[(p, j)];
            }
        }
    }
    let rhs = -DMatrix::from_column_slice(n * n, 1, c.as_slice());
    let sol = k.lu().solve(&rhs).expect("Hurwitz F gives a nonsingular system");
    Matrix::from_column_slice(n, n, sol.as_slice())
}

/// `(A, W, Q)` with `A`, `B` uniform in `[−2, 2]`, `W = BBᵀ`, `Q = LLᵀ + 10⁻³I`.
pub fn random_care_instance(rng: &mut ChaCha8Rng) -> (Matrix, Matrix, Matrix) {
    let n = rng.random_range(1..=5);
    let m = rng.random_range(1..=n);
    let a = random_matrix(rng, n, n, 2.0);
    let b = random_matrix(rng, n, m, 2.0);
    let l = random_matrix(rng, n, n, 1.5);
    let q = &l * l.transpose() + Matrix::identity(n, n) * 1e-3;
    (a, &b * b.transpose(), q)
}

/// Hurwitz `F` (a random matrix shifted left) and symmetric `C`.
pub fn random_lyapunov_instance(rng: &mut ChaCha8Rng) -> (Matrix, Matrix) {
    loop {
        let n = rng.random_range(1..=5);
        let m = random_matrix(rng, n, n, 2.0);
        let shift = rng.random_range(0.05..1.0) * m.norm() + 0.05;
        let f = &m - Matrix::identity(n, n) * shift;
        let report = spectral_report(&f).expect("small dense eigenproblem");
        if report.max_real_part < -1e-3 {
            let c = random_matrix(rng, n, n, 3.0);
            return (f, &c + c.transpose());
        }
    }
}

/// Stabilizable constant-coefficient problem with `Q = LLᵀ + I`.
pub fn random_linear_problem(rng: &mut ChaCha8Rng, d: usize, m: usize) -> LinearProblem {
    loop {
        let a = random_matrix(rng, d, d, 1.0);
        let b = random_matrix(rng, d, m, 1.0);
        let l = random_matrix(rng, d, d, 1.0);
        let q = &l * l.transpose() + Matrix::identity(d, d);
        if is_stabilizable(&a, &b) {
            return LinearProblem::new("random-linear", a, b, q).expect("consistent shapes");
        }
    }
}

/// Stabilizing Riccati solution for `𝒜(x, α)` and `B(x)`.
pub fn pi_at<P: ControlProblem>(
    family: &RepresentationFamily<P>,
    x: &Vector,
    alpha: &Coefficients,
) -> Option<Matrix> {
    let a = family.combine(alpha, x).ok()?;
    let b = family.problem().input_map(x);
    solve_care(&a, &(&b * b.transpose()), family.problem().cost_weight()).ok()
}

/// Central differences of the Riccati solution along each coordinate.
pub fn fd_pi_derivatives<P: ControlProblem>(
    family: &RepresentationFamily<P>,
    x: &Vector,
    alpha: &Coefficients,
) -> Option<Vec<Matrix>> {
    (0..x.len())
        .map(|k| {
            let h = 1e-5 * x[k].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            Some((pi_at(family, &xp, alpha)? - pi_at(family, &xm, alpha)?) / (2.0 * h))
        })
        .collect()
}

/// HJB residual of `Ṽ(x) = ½xᵀΠ(x)x`, with `∇Ṽ` from central differences:
/// `∇Ṽᵀf + ½xᵀQx − ½∇ṼᵀW∇Ṽ`. Also returns the size of the largest term.
pub fn fd_hjb_residual<P: ControlProblem>(
    family: &RepresentationFamily<P>,
    x: &Vector,
    alpha: &Coefficients,
) -> Option<(f64, f64)> {
    let value = |y: &Vector| -> Option<f64> { Some(0.5 * y.dot(&(pi_at(family, y, alpha)? * y))) };
    let mut grad = Vector::zeros(x.len());
    for k in 0..x.len() {
        let h = 1e-5 * x[k].abs().max(1.0);
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += h;
        xm[k] -= h;
        grad[k] = (value(&xp)? - value(&xm)?) / (2.0 * h);
    }
    let p = family.problem();
    let b = p.input_map(x);
    let bt_grad = b.transpose() * &grad;
    let terms = [
        grad.dot(&p.drift(x)),
        0.5 * x.dot(&(p.cost_weight() * x)),
        -0.5 * bt_grad.dot(&bt_grad),
    ];
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    Some((terms.iter().sum(), scale))
}

pub fn lorenz_state(rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_fn(3, |_, _| rng.random_range(-2.0..2.0))
}

pub fn pendulum_state(rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_vec(vec![
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.2..1.2),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ])
}
