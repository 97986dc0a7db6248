use nalgebra::linalg::SVD;
use nalgebra::Complex;

use super::{
    ensure_finite, ensure_square, is_stabilizable, solve_lyapunov, symmetrize, to_complex,
    LinalgError, Matrix, OrderedSchur, AXIS_TOL, CARE_RESIDUAL_TOL, SVD_EPS, SVD_MAX_ITERS,
};

/// `AᵀΠ + ΠA − ΠWΠ + Q`.
pub fn care_residual(a: &Matrix, w: &Matrix, q: &Matrix, pi: &Matrix) -> Matrix {
    a.transpose() * pi + pi * a - pi * w * pi + q
}

/// Stabilizing solution of `AᵀΠ + ΠA − ΠWΠ + Q = 0`.
///
/// `W` and `Q` must be symmetric positive semidefinite. The solution is read
/// off the stable invariant subspace `[U₁; U₂]` of the Hamiltonian
/// `[[A, −W], [−Q, −Aᵀ]]` as `Π = U₂U₁⁻¹`, then polished with at most two
/// residual-correction steps if the first pass misses the residual target.
/// Solutions whose relative residual still exceeds [`CARE_RESIDUAL_TOL`]
/// are rejected as [`LinalgError::IllConditioned`].
pub fn solve_care(a: &Matrix, w: &Matrix, q: &Matrix) -> Result<Matrix, LinalgError> {
    let n = a.nrows();
    ensure_square(a, n)?;
    ensure_square(w, n)?;
    ensure_square(q, n)?;
    ensure_finite(a)?;
    ensure_finite(w)?;
    ensure_finite(q)?;
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    if !is_stabilizable(a, w) {
        return Err(LinalgError::NotStabilizable);
    }

    let mut h = Matrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&(-w));
    h.view_mut((n, 0), (n, n)).copy_from(&(-q));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));
    let h_norm = h.norm();

    let mut schur = OrderedSchur::new(to_complex(&h))?;
    let axis = AXIS_TOL * h_norm.max(f64::MIN_POSITIVE);
    if schur.eigenvalues().any(|l| l.re.abs() < axis) {
        return Err(LinalgError::NoStabilizingSolution);
    }
    let stable = schur.reorder(|l| l.re < 0.0);
    if stable != n {
        return Err(LinalgError::NoStabilizingSolution);
    }

    let u1 = schur.z.view((0, 0), (n, n)).clone_owned();
    let u2 = schur.z.view((n, 0), (n, n)).clone_owned();
    let svd = SVD::try_new(u1.clone(), false, false, SVD_EPS, SVD_MAX_ITERS)
        .ok_or(LinalgError::EigenFailure)?;
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax) {
        return Err(LinalgError::IllConditioned);
    }
    // Π U₁ = U₂  ⇔  U₁ᵀ Πᵀ = U₂ᵀ
    let pi_t = u1
        .transpose()
        .lu()
        .solve(&u2.transpose())
        .ok_or(LinalgError::IllConditioned)?;
    let mut pi = symmetrize(&pi_t.transpose().map(|z: Complex<f64>| z.re));
    ensure_finite(&pi)?;

    for _ in 0..2 {
        let r = care_residual(a, w, q, &pi);
        if r.norm() <= 0.01 * CARE_RESIDUAL_TOL * pi.norm().max(1.0) {
            break;
        }
        // Newton correction: (A − WΠ)ᵀΔ + Δ(A − WΠ) + R = 0
        let closed = a - w * &pi;
        match solve_lyapunov(&closed, &symmetrize(&r)) {
            Ok(delta) => {
                let next = symmetrize(&(&pi + delta));
                if care_residual(a, w, q, &next).norm() < r.norm() {
                    pi = next;
                } else {
                    break;
                }
            }
            Err(_) => break,
        }
    }
    // Near-uncontrollable data puts the attainable residual (≈ ε‖Π‖²‖W‖)
    // above the target; report it instead of returning a poor solution.
    if care_residual(a, w, q, &pi).norm() > CARE_RESIDUAL_TOL * pi.norm().max(1.0) {
        return Err(LinalgError::IllConditioned);
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_report;

    fn m(r: usize, c: usize, v: &[f64]) -> Matrix {
        Matrix::from_row_slice(r, c, v)
    }

    fn rel_residual(a: &Matrix, w: &Matrix, q: &Matrix, pi: &Matrix) -> f64 {
        care_residual(a, w, q, pi).norm() / pi.norm().max(1.0)
    }

    #[test]
    fn scalar_closed_form() {
        let pi = solve_care(&m(1, 1, &[0.0]), &m(1, 1, &[1.0]), &m(1, 1, &[1.0])).unwrap();
        assert!((pi[(0, 0)] - 1.0).abs() < 1e-14);
        // π = (a + √(a² + wq)) / w
        let (a, w, q) = (0.7, 2.0, 3.0);
        let pi = solve_care(&m(1, 1, &[a]), &m(1, 1, &[w]), &m(1, 1, &[q])).unwrap();
        let expected = (a + (a * a + w * q).sqrt()) / w;
        assert!((pi[(0, 0)] - expected).abs() < 1e-13 * expected);
    }

    #[test]
    fn zero_data_stable_a() {
        let pi = solve_care(&m(1, 1, &[-1.0]), &m(1, 1, &[0.0]), &m(1, 1, &[0.0])).unwrap();
        assert_eq!(pi[(0, 0)], 0.0);
    }

    #[test]
    fn double_integrator() {
        let a = m(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let w = m(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let q = Matrix::identity(2, 2);
        let pi = solve_care(&a, &w, &q).unwrap();
        assert!(rel_residual(&a, &w, &q, &pi) < 1e-10);
        assert!(spectral_report(&(&a - &w * &pi)).unwrap().is_hurwitz);
        // known: Π = [[√3, 1], [1, √3]]
        let s3 = 3f64.sqrt();
        assert!((pi - m(2, 2, &[s3, 1.0, 1.0, s3])).norm() < 1e-12);
    }

    #[test]
    fn uncontrollable_unstable_mode() {
        let r = solve_care(&m(1, 1, &[1.0]), &m(1, 1, &[0.0]), &m(1, 1, &[1.0]));
        assert_eq!(r, Err(LinalgError::NotStabilizable));
    }

    #[test]
    fn imaginary_axis_hamiltonian() {
        // stabilizable but the undamped, unobserved oscillator puts ±i on the axis
        let a = m(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let w = m(2, 2, &[0.0, 0.0, 0.0, 0.0]);
        let q = Matrix::zeros(2, 2);
        let r = solve_care(&a, &w, &q);
        assert!(matches!(
            r,
            Err(LinalgError::NoStabilizingSolution) | Err(LinalgError::NotStabilizable)
        ));
        let a = m(1, 1, &[-0.0]);
        let r = solve_care(&a, &m(1, 1, &[1.0]), &m(1, 1, &[0.0]));
        assert_eq!(r, Err(LinalgError::NoStabilizingSolution));
    }

    #[test]
    fn shape_errors() {
        let r = solve_care(&m(1, 1, &[0.0]), &Matrix::identity(2, 2), &m(1, 1, &[1.0]));
        assert_eq!(r, Err(LinalgError::DimensionMismatch));
        let r = solve_care(&m(1, 1, &[f64::INFINITY]), &m(1, 1, &[1.0]), &m(1, 1, &[1.0]));
        assert_eq!(r, Err(LinalgError::NonFinite));
    }
}
