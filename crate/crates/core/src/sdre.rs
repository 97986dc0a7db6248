//! Pointwise SDRE synthesis at a fixed state and coefficient vector.
//!
//! [`assemble_point`] runs the whole chain: Riccati solve for `Π`, one
//! Lyapunov solve per axis for `∂ₖΠ`, then `φ`, the HJB residual `E` and
//! the augmented feedback `u = −Bᵀ(Πx + φ)`.

use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{
    is_detectable, is_stabilizable, solve_care, symmetrize, LinalgError, LyapunovSolver, Matrix,
};
use crate::model::{Coefficients, ControlProblem, ModelError, RepresentationFamily, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdreError {
    Model(ModelError),
    /// `(𝒜(x, α), B(x))` fails the Hautus test.
    NotStabilizable,
    /// `(𝒜(x, α), Q)` fails the dual Hautus test.
    NotDetectable,
    /// The Riccati solve failed.
    Care(LinalgError),
    /// `𝒜 − WΠ` is not Hurwitz, so the sensitivity equations are singular.
    NotHurwitzClosedLoop,
    /// A sensitivity (Lyapunov) solve failed.
    Sensitivity(LinalgError),
}

impl SdreError {
    /// True for the failures that mean no stabilizing Riccati solution
    /// exists at this state.
    pub fn is_care_failure(&self) -> bool {
        !matches!(self, SdreError::Model(_))
    }
}

impl fmt::Display for SdreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SdreError::Model(e) => write!(f, "model error: {e}"),
            SdreError::NotStabilizable => f.write_str("representation is not stabilizable"),
            SdreError::NotDetectable => f.write_str("representation is not detectable"),
            SdreError::Care(e) => write!(f, "Riccati solve failed: {e}"),
            SdreError::NotHurwitzClosedLoop => f.write_str("closed-loop matrix is not Hurwitz"),
            SdreError::Sensitivity(e) => write!(f, "sensitivity solve failed: {e}"),
        }
    }
}

impl core::error::Error for SdreError {}

impl From<ModelError> for SdreError {
    fn from(e: ModelError) -> Self {
        SdreError::Model(e)
    }
}

/// Everything computed at one `(x, α)`.
#[derive(Debug, Clone)]
pub struct SdrePoint {
    pub state: Vector,
    pub alpha: Coefficients,
    /// `𝒜(x, α)`
    pub a: Matrix,
    pub b: Matrix,
    /// `BBᵀ`
    pub w: Matrix,
    pub pi: Matrix,
    /// `∂Π/∂x_k` for each axis.
    pub pi_derivs: Vec<Matrix>,
    pub phi: Vector,
    /// Signed residual `E(x, α)`.
    pub residual: f64,
    /// `u = −Bᵀ(Πx + φ)`
    pub control: Vector,
    /// `½xᵀΠx`
    pub value_estimate: f64,
}

impl SdrePoint {
    /// `𝒜 − WΠ`.
    pub fn closed_loop(&self) -> Matrix {
        &self.a - &self.w * &self.pi
    }
}

/// Solves the SDRE and its sensitivities at `(x, α)`.
pub fn assemble_point<P: ControlProblem>(
    family: &RepresentationFamily<P>,
    x: &Vector,
    alpha: &Coefficients,
) -> Result<SdrePoint, SdreError> {
    let problem = family.problem();
    let d = problem.state_dim();
    let a = family.combine(alpha, x)?;
    let b = problem.input_map(x);
    if b.nrows() != d || b.ncols() != problem.input_dim() {
        return Err(ModelError::DimensionMismatch.into());
    }
    let q = problem.cost_weight();

    if !is_stabilizable(&a, &b) {
        return Err(SdreError::NotStabilizable);
    }
    if !is_detectable(&a, q) {
        return Err(SdreError::NotDetectable);
    }
    let w = &b * b.transpose();
    let pi = solve_care(&a, &w, q).map_err(|e| match e {
        LinalgError::NotStabilizable => SdreError::NotStabilizable,
        other => SdreError::Care(other),
    })?;

    let closed = &a - &w * &pi;
    let lyap = LyapunovSolver::new(&closed).map_err(|e| match e {
        LinalgError::NotHurwitz => SdreError::NotHurwitzClosedLoop,
        other => SdreError::Sensitivity(other),
    })?;

    let mut pi_derivs = Vec::with_capacity(d);
    for k in 0..d {
        let da = family.combine_jacobian(alpha, x, k)?;
        let db = problem.input_map_jacobian(x, k);
        let dw = &db * b.transpose() + &b * db.transpose();
        let qk = da.transpose() * &pi + &pi * &da - &pi * dw * &pi;
        let dpi = lyap.solve(&symmetrize(&qk)).map_err(SdreError::Sensitivity)?;
        pi_derivs.push(dpi);
    }

    let phi = compute_phi(x, &pi_derivs)?;
    let mut point = SdrePoint {
        state: x.clone(),
        alpha: alpha.clone(),
        control: Vector::zeros(b.ncols()),
        value_estimate: 0.5 * x.dot(&(&pi * x)),
        a,
        b,
        w,
        pi,
        pi_derivs,
        phi,
        residual: 0.0,
    };
    point.residual = residual(&point);
    point.control = feedback(&point);
    Ok(point)
}

/// `φₖ = ½ xᵀ(∂ₖΠ)x`.
pub fn compute_phi(x: &Vector, pi_derivs: &[Matrix]) -> Result<Vector, SdreError> {
    let d = x.len();
    if pi_derivs.len() != d || pi_derivs.iter().any(|m| m.shape() != (d, d)) {
        return Err(ModelError::DimensionMismatch.into());
    }
    Ok(Vector::from_iterator(
        d,
        pi_derivs.iter().map(|dp| 0.5 * x.dot(&(dp * x))),
    ))
}

/// `E = φᵀ(2[𝒜 − WΠ]x − Wφ)`.
pub fn residual(point: &SdrePoint) -> f64 {
    let x = &point.state;
    let drift = point.closed_loop() * x * 2.0 - &point.w * &point.phi;
    point.phi.dot(&drift)
}

/// `u = −Bᵀ(Πx + φ)`.
pub fn feedback(point: &SdrePoint) -> Vector {
    -(point.b.transpose() * value_gradient(point))
}

/// `∇Ṽ = Πx + φ`.
pub fn value_gradient(point: &SdrePoint) -> Vector {
    &point.pi * &point.state + &point.phi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LinearProblem;

    #[test]
    fn phi_examples() {
        let x = Vector::from_vec(alloc::vec![2.0]);
        let phi = compute_phi(&x, &[Matrix::from_element(1, 1, 3.0)]).unwrap();
        assert_eq!(phi[0], 6.0);
        let zero = compute_phi(&Vector::zeros(2), &[Matrix::identity(2, 2), Matrix::identity(2, 2)])
            .unwrap();
        assert_eq!(zero, Vector::zeros(2));
        assert!(compute_phi(&x, &[]).is_err());
    }

    #[test]
    fn feedback_by_substitution() {
        let point = SdrePoint {
            state: Vector::from_vec(alloc::vec![1.0]),
            alpha: Coefficients::zeros(0),
            a: Matrix::zeros(1, 1),
            b: Matrix::from_element(1, 1, 1.0),
            w: Matrix::from_element(1, 1, 1.0),
            pi: Matrix::from_element(1, 1, 1.0),
            pi_derivs: alloc::vec![Matrix::from_element(1, 1, 1.0)],
            phi: Vector::from_vec(alloc::vec![0.5]),
            residual: 0.0,
            control: Vector::zeros(1),
            value_estimate: 0.5,
        };
        assert_eq!(feedback(&point)[0], -1.5);
        // E = 0.5 · (2·(0 − 1)·1 − 1·0.5) = −1.25
        assert_eq!(residual(&point), -1.25);
    }

    #[test]
    fn linear_problem_degenerates_to_lqr() {
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, -1.0]);
        let b = Matrix::from_row_slice(2, 1, &[0.0, 1.0]);
        let p = LinearProblem::new("lin", a.clone(), b.clone(), Matrix::identity(2, 2)).unwrap();
        let fam = RepresentationFamily::base_only(p);
        let x = Vector::from_vec(alloc::vec![0.4, -1.3]);
        let pt = assemble_point(&fam, &x, &Coefficients::zeros(0)).unwrap();
        assert!(pt.pi_derivs.iter().all(|m| m.norm() == 0.0));
        assert_eq!(pt.phi, Vector::zeros(2));
        assert_eq!(pt.residual, 0.0);
        let lqr = -(b.transpose() * &pt.pi * &x);
        assert!((&pt.control - lqr).norm() < 1e-12);
    }

    #[test]
    fn origin_is_trivial() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let b = Matrix::from_row_slice(2, 1, &[0.0, 1.0]);
        let p = LinearProblem::new("lin", a, b, Matrix::identity(2, 2)).unwrap();
        let fam = RepresentationFamily::generate_full(p, &[-1.0, 1.0]).unwrap();
        let alpha = Coefficients::ones(fam.len());
        let pt = assemble_point(&fam, &Vector::zeros(2), &alpha).unwrap();
        assert_eq!(pt.phi, Vector::zeros(2));
        assert_eq!(pt.control, Vector::zeros(1));
        assert_eq!(pt.residual, 0.0);
        assert_eq!(pt.value_estimate, 0.0);
    }

    #[test]
    fn unstabilizable_representation_errors() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let b = Matrix::from_row_slice(2, 1, &[0.0, 1.0]);
        let p = LinearProblem::new("lin", a, b, Matrix::identity(2, 2)).unwrap();
        let fam = RepresentationFamily::base_only(p);
        let r = assemble_point(&fam, &Vector::from_vec(alloc::vec![1.0, 1.0]), &Coefficients::zeros(0));
        assert_eq!(r.err(), Some(SdreError::NotStabilizable));
    }
}
