use alloc::vec::Vec;

use nalgebra::linalg::{SymmetricEigen, SVD};
use nalgebra::Complex;

use super::{
    ensure_finite, to_complex, CMatrix, LinalgError, Matrix, OrderedSchur, RANK_TOL, SVD_EPS,
    SVD_MAX_ITERS,
};

/// Closed-loop stability diagnostics for a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub eigenvalues: Vec<Complex<f64>>,
    pub max_real_part: f64,
    pub is_hurwitz: bool,
}

pub fn eigenvalues(f: &Matrix) -> Result<Vec<Complex<f64>>, LinalgError> {
    if !f.is_square() {
        return Err(LinalgError::DimensionMismatch);
    }
    ensure_finite(f)?;
    if f.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = OrderedSchur::new(to_complex(f))?;
    // Real parts within roundoff of the axis are reported as exactly zero.
    let floor = 8.0 * f64::EPSILON * f.norm().max(1.0);
    Ok(schur
        .eigenvalues()
        .map(|l| if l.re.abs() <= floor { Complex::new(0.0, l.im) } else { l })
        .collect())
}

pub fn spectral_report(f: &Matrix) -> Result<SpectralReport, LinalgError> {
    let eigenvalues = eigenvalues(f)?;
    let max_real_part = eigenvalues
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectralReport {
        is_hurwitz: max_real_part < 0.0,
        max_real_part,
        eigenvalues,
    })
}

/// Numerical rank with singular values below `RANK_TOL · σ_max` dropped.
fn numerical_rank(m: CMatrix) -> Result<usize, LinalgError> {
    let svd = SVD::try_new(m, false, false, SVD_EPS, SVD_MAX_ITERS)
        .ok_or(LinalgError::EigenFailure)?;
    let sv = svd.singular_values;
    let largest = sv.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > RANK_TOL * largest).count())
}

fn hautus(a: &Matrix, b: &Matrix) -> Result<bool, LinalgError> {
    let n = a.nrows();
    if !a.is_square() || b.nrows() != n {
        return Err(LinalgError::DimensionMismatch);
    }
    ensure_finite(a)?;
    ensure_finite(b)?;
    // Eigenvalues a few ulps left of the axis still get tested.
    let margin = 1e-12 * a.norm().max(1.0);
    for lambda in eigenvalues(a)? {
        if lambda.re < -margin {
            continue;
        }
        let mut pencil = CMatrix::zeros(n, n + b.ncols());
        for i in 0..n {
            for j in 0..n {
                pencil[(i, j)] = Complex::new(a[(i, j)], 0.0);
            }
            pencil[(i, i)] -= lambda;
            for j in 0..b.ncols() {
                pencil[(i, n + j)] = Complex::new(b[(i, j)], 0.0);
            }
        }
        if numerical_rank(pencil)? < n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// PBH test: `rank [A − λI, B] = d` at every eigenvalue with `Re λ ≥ 0`.
///
/// Returns `false` on malformed input rather than erroring.
pub fn is_stabilizable(a: &Matrix, b: &Matrix) -> bool {
    hautus(a, b).unwrap_or(false)
}

/// Dual PBH test: `(Aᵀ, Q^{1/2})` stabilizable.
pub fn is_detectable(a: &Matrix, q: &Matrix) -> bool {
    if !q.is_square() || q.nrows() != a.nrows() {
        return false;
    }
    let root = psd_sqrt(q);
    is_stabilizable(&a.transpose(), &root)
}

/// Symmetric PSD square root; negative eigenvalues are clamped to zero.
pub fn psd_sqrt(q: &Matrix) -> Matrix {
    let eig = SymmetricEigen::new(super::symmetrize(q));
    let roots = eig.eigenvalues.map(|l| libm::sqrt(l.max(0.0)));
    &eig.eigenvectors * Matrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}
