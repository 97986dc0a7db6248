//! Control-affine problems in state-dependent-coefficient form and the
//! family of equivalent semilinear representations built from them.

mod family;
mod validate;

use alloc::boxed::Box;
use alloc::sync::Arc;
use core::fmt;

use nalgebra::DVector;

use crate::linalg::Matrix;

pub use family::{Coefficients, PerturbationSpec, RepresentationFamily};
pub use validate::{validate_problem, Diagnostic, JacobianSource};

/// Dense real state or input vector.
pub type Vector = DVector<f64>;

/// A control-affine system `ẏ = A₀(y)y + B(y)u` with running cost
/// `½(yᵀQy + uᵀu)`.
///
/// Axis indices `k` are zero-based. Jacobians are supplied analytically;
/// [`validate_problem`] checks them against finite differences.
pub trait ControlProblem {
    fn name(&self) -> &str;
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    /// `A₀(x)`, d×d.
    fn base_rep(&self, x: &Vector) -> Matrix;
    /// `∂A₀/∂x_k`, d×d.
    fn base_rep_jacobian(&self, x: &Vector, k: usize) -> Matrix;
    /// `B(x)`, d×m.
    fn input_map(&self, x: &Vector) -> Matrix;
    /// `∂B/∂x_k`, d×m.
    fn input_map_jacobian(&self, x: &Vector, k: usize) -> Matrix;
    /// `Q`, symmetric positive semidefinite.
    fn cost_weight(&self) -> &Matrix;

    /// `f(x) = A₀(x)x`.
    fn drift(&self, x: &Vector) -> Vector {
        self.base_rep(x) * x
    }
}

/// Shareable, type-erased problem handle.
pub type ProblemSpec = Arc<dyn ControlProblem + Send + Sync>;

macro_rules! forward_problem {
    ($($ty:ty),*) => {$(
        impl<P: ControlProblem + ?Sized> ControlProblem for $ty {
            fn name(&self) -> &str { (**self).name() }
            fn state_dim(&self) -> usize { (**self).state_dim() }
            fn input_dim(&self) -> usize { (**self).input_dim() }
            fn base_rep(&self, x: &Vector) -> Matrix { (**self).base_rep(x) }
            fn base_rep_jacobian(&self, x: &Vector, k: usize) -> Matrix {
                (**self).base_rep_jacobian(x, k)
            }
            fn input_map(&self, x: &Vector) -> Matrix { (**self).input_map(x) }
            fn input_map_jacobian(&self, x: &Vector, k: usize) -> Matrix {
                (**self).input_map_jacobian(x, k)
            }
            fn cost_weight(&self) -> &Matrix { (**self).cost_weight() }
            fn drift(&self, x: &Vector) -> Vector { (**self).drift(x) }
        }
    )*};
}

forward_problem!(&P, Box<P>, Arc<P>);

/// Constant-coefficient problem `ẏ = Ay + Bu`. The SDRE reduces to LQR here.
#[derive(Debug, Clone)]
pub struct LinearProblem {
    name: alloc::string::String,
    a: Matrix,
    b: Matrix,
    q: Matrix,
}

impl LinearProblem {
    pub fn new(name: &str, a: Matrix, b: Matrix, q: Matrix) -> Result<Self, ModelError> {
        let d = a.nrows();
        if !a.is_square() || b.nrows() != d || b.ncols() == 0 || q.shape() != (d, d) || d == 0 {
            return Err(ModelError::DimensionMismatch);
        }
        if a.iter().chain(b.iter()).chain(q.iter()).any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        Ok(Self {
            name: name.into(),
            a,
            b,
            q,
        })
    }
}

impl ControlProblem for LinearProblem {
    fn name(&self) -> &str {
        &self.name
    }
    fn state_dim(&self) -> usize {
        self.a.nrows()
    }
    fn input_dim(&self) -> usize {
        self.b.ncols()
    }
    fn base_rep(&self, _x: &Vector) -> Matrix {
        self.a.clone()
    }
    fn base_rep_jacobian(&self, _x: &Vector, _k: usize) -> Matrix {
        Matrix::zeros(self.a.nrows(), self.a.ncols())
    }
    fn input_map(&self, _x: &Vector) -> Matrix {
        self.b.clone()
    }
    fn input_map_jacobian(&self, _x: &Vector, _k: usize) -> Matrix {
        Matrix::zeros(self.b.nrows(), self.b.ncols())
    }
    fn cost_weight(&self) -> &Matrix {
        &self.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelError {
    DimensionMismatch,
    IndexOutOfRange,
    NonFinite,
    /// Perturbation needs `col_lo < col_hi` and a nonzero constant.
    InvalidPerturbation,
    /// Two perturbations share `(row, col_lo, col_hi, c)`.
    DuplicatePerturbation,
    /// The constant set must be nonempty, nonzero and duplicate-free.
    InvalidConstantSet,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            ModelError::DimensionMismatch => "dimension mismatch",
            ModelError::IndexOutOfRange => "index out of range",
            ModelError::NonFinite => "non-finite value",
            ModelError::InvalidPerturbation => "invalid perturbation",
            ModelError::DuplicatePerturbation => "duplicate perturbation",
            ModelError::InvalidConstantSet => "invalid perturbation constant set",
        };
        f.write_str(msg)
    }
}

impl core::error::Error for ModelError {}
