//! Dense real matrix-equation kernels.
//!
//! Everything here works on small dense [`Matrix`] values (the benchmarks
//! never exceed 4×4, the Hamiltonian pencil 8×8). The production paths are
//!
//! * [`solve_care`]: stable invariant subspace of the Hamiltonian matrix,
//!   read off an ordered complex Schur form;
//! * [`solve_lyapunov`]: Bartels–Stewart on the complex Schur form of the
//!   closed-loop matrix;
//! * [`is_stabilizable`] / [`is_detectable`]: Hautus rank tests.

mod care;
mod lyapunov;
mod schur;
mod spectral;

use core::fmt;

use nalgebra::{Complex, DMatrix};

pub use care::{care_residual, solve_care};
pub use lyapunov::{lyapunov_residual, solve_lyapunov, LyapunovSolver};
pub use schur::OrderedSchur;
pub use spectral::{
    eigenvalues, is_detectable, is_stabilizable, psd_sqrt, spectral_report, SpectralReport,
};

/// Dense real matrix, the only matrix type used across the crate.
pub type Matrix = DMatrix<f64>;
pub(crate) type CMatrix = DMatrix<Complex<f64>>;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-9;
/// Hamiltonian eigenvalues with `|Re λ| < AXIS_TOL · ‖H‖` are treated as imaginary.
pub const AXIS_TOL: f64 = 1e-9;
/// Relative CARE residual accepted after a solve.
pub const CARE_RESIDUAL_TOL: f64 = 1e-10;
/// Relative Lyapunov residual accepted after a solve.
pub const LYAPUNOV_RESIDUAL_TOL: f64 = 1e-11;

pub(crate) const SVD_EPS: f64 = 1e-15;
pub(crate) const SVD_MAX_ITERS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinalgError {
    /// Operand shapes do not fit the equation.
    DimensionMismatch,
    /// An operand contains NaN or an infinity.
    NonFinite,
    /// Hautus test failed for an eigenvalue with nonnegative real part.
    NotStabilizable,
    /// The Hamiltonian has eigenvalues on (or numerically at) the imaginary axis.
    NoStabilizingSolution,
    /// The stable invariant-subspace basis is numerically singular.
    IllConditioned,
    /// The Lyapunov operator matrix has an eigenvalue with `Re λ ≥ 0`.
    NotHurwitz,
    /// Breakdown during triangular back-substitution.
    SingularSystem,
    /// The Schur iteration did not converge.
    EigenFailure,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            LinalgError::DimensionMismatch => "dimension mismatch",
            LinalgError::NonFinite => "matrix contains non-finite entries",
            LinalgError::NotStabilizable => "pair is not stabilizable",
            LinalgError::NoStabilizingSolution => {
                "Hamiltonian has eigenvalues on the imaginary axis; no stabilizing solution"
            }
            LinalgError::IllConditioned => "invariant subspace basis is numerically singular",
            LinalgError::NotHurwitz => "matrix is not Hurwitz",
            LinalgError::SingularSystem => "singular system in back-substitution",
            LinalgError::EigenFailure => "eigenvalue iteration did not converge",
        };
        f.write_str(msg)
    }
}

impl core::error::Error for LinalgError {}

pub(crate) fn ensure_finite(m: &Matrix) -> Result<(), LinalgError> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

pub(crate) fn ensure_square(m: &Matrix, n: usize) -> Result<(), LinalgError> {
    if m.nrows() == n && m.ncols() == n {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch)
    }
}

/// `(X + Xᵀ) / 2`.
pub fn symmetrize(x: &Matrix) -> Matrix {
    (x + x.transpose()) * 0.5
}

pub(crate) fn to_complex(m: &Matrix) -> CMatrix {
    m.map(|v| Complex::new(v, 0.0))
}
