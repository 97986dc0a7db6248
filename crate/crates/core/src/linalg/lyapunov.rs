use nalgebra::Complex;

use super::{
    ensure_finite, ensure_square, symmetrize, to_complex, CMatrix, LinalgError, Matrix,
    OrderedSchur,
};

/// `FᵀX + XF + C`.
pub fn lyapunov_residual(f: &Matrix, c: &Matrix, x: &Matrix) -> Matrix {
    f.transpose() * x + x * f + c
}

/// Solves `FᵀX + XF + C = 0` for Hurwitz `F` (Bartels–Stewart).
pub fn solve_lyapunov(f: &Matrix, c: &Matrix) -> Result<Matrix, LinalgError> {
    LyapunovSolver::new(f)?.solve(c)
}

/// Schur factorization of a Hurwitz `F`, reusable across right-hand sides.
///
/// With `F = Z T Zᴴ` the equation becomes `TᴴY + YT = −ZᴴCZ` for
/// `Y = ZᴴXZ`, which is solved entry by entry in column-major order.
#[derive(Debug, Clone)]
pub struct LyapunovSolver {
    schur: Option<OrderedSchur>,
    n: usize,
}

impl LyapunovSolver {
    pub fn new(f: &Matrix) -> Result<Self, LinalgError> {
        let n = f.nrows();
        ensure_square(f, n)?;
        ensure_finite(f)?;
        if n == 0 {
            return Ok(Self { schur: None, n });
        }
        let schur = OrderedSchur::new(to_complex(f))?;
        if schur.eigenvalues().any(|l| !(l.re < 0.0)) {
            return Err(LinalgError::NotHurwitz);
        }
        Ok(Self {
            schur: Some(schur),
            n,
        })
    }

    pub fn solve(&self, c: &Matrix) -> Result<Matrix, LinalgError> {
        let n = self.n;
        ensure_square(c, n)?;
        ensure_finite(c)?;
        let Some(schur) = &self.schur else {
            return Ok(Matrix::zeros(0, 0));
        };
        let t = &schur.t;
        let z = &schur.z;
        let rhs: CMatrix = -(z.adjoint() * to_complex(c) * z);

        let scale = t.norm().max(f64::MIN_POSITIVE);
        let mut y = CMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let mut acc = rhs[(i, j)];
                for k in 0..i {
                    acc -= t[(k, i)].conj() * y[(k, j)];
                }
                for k in 0..j {
                    acc -= y[(i, k)] * t[(k, j)];
                }
                let pivot: Complex<f64> = t[(i, i)].conj() + t[(j, j)];
                if libm::sqrt(pivot.norm_sqr()) <= 1e-14 * scale {
                    return Err(LinalgError::SingularSystem);
                }
                y[(i, j)] = acc / pivot;
            }
        }
        let x = (z * y * z.adjoint()).map(|v| v.re);
        let x = symmetrize(&x);
        ensure_finite(&x).map_err(|_| LinalgError::SingularSystem)?;
        Ok(x)
    }

    /// Eigenvalues of `F` from the stored factorization.
    pub fn eigenvalues(&self) -> impl Iterator<Item = Complex<f64>> + '_ {
        self.schur.iter().flat_map(|s| s.eigenvalues())
    }
}
