use alloc::vec;
use alloc::vec::Vec;

use super::{ControlProblem, ModelError, Vector};
use crate::linalg::Matrix;

/// Antisymmetric rank-two perturbation of one row of `A₀`.
///
/// Adds `c·x[col_hi]` at `(row, col_lo)` and subtracts `c·x[col_lo]` at
/// `(row, col_hi)`, which leaves `A(x)x` unchanged. Indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub row: usize,
    pub col_lo: usize,
    pub col_hi: usize,
    pub c: f64,
}

impl PerturbationSpec {
    pub fn new(row: usize, col_lo: usize, col_hi: usize, c: f64) -> Result<Self, ModelError> {
        if col_lo >= col_hi || c == 0.0 || !c.is_finite() {
            return Err(ModelError::InvalidPerturbation);
        }
        Ok(Self {
            row,
            col_lo,
            col_hi,
            c,
        })
    }

    /// Builds from the one-based `(i₁, j₁, j₂, c)` tuple used in write-ups.
    pub fn from_one_based(i1: usize, j1: usize, j2: usize, c: f64) -> Result<Self, ModelError> {
        if i1 == 0 || j1 == 0 || j2 == 0 {
            return Err(ModelError::IndexOutOfRange);
        }
        Self::new(i1 - 1, j1 - 1, j2 - 1, c)
    }

    pub fn one_based(&self) -> (usize, usize, usize, f64) {
        (self.row + 1, self.col_lo + 1, self.col_hi + 1, self.c)
    }

    fn fits(&self, d: usize) -> bool {
        self.row < d && self.col_hi < d
    }

    /// Adds `weight` times this perturbation at `x` into `a`.
    fn apply(&self, a: &mut Matrix, x: &Vector, weight: f64) {
        let wc = weight * self.c;
        a[(self.row, self.col_lo)] += wc * x[self.col_hi];
        a[(self.row, self.col_hi)] -= wc * x[self.col_lo];
    }

    /// Adds `weight` times `∂/∂x_k` of this perturbation into `a`.
    fn apply_jacobian(&self, a: &mut Matrix, k: usize, weight: f64) {
        if k == self.col_hi {
            a[(self.row, self.col_lo)] += weight * self.c;
        }
        if k == self.col_lo {
            a[(self.row, self.col_hi)] -= weight * self.c;
        }
    }
}

/// Reduced affine-combination coefficients `α ∈ ℝᴺ`.
///
/// The base representation carries the slack weight `1 − Σαᵢ`, so `α = 0`
/// is `A₀` itself and the unit vector `eᵢ` selects member `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients(Vec<f64>);

impl Coefficients {
    pub fn new(values: Vec<f64>) -> Result<Self, ModelError> {
        if values.iter().all(|v| v.is_finite()) {
            Ok(Self(values))
        } else {
            Err(ModelError::NonFinite)
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    /// `t·eᵢ`.
    pub fn axis(n: usize, i: usize, t: f64) -> Self {
        let mut v = vec![0.0; n];
        v[i] = t;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Weight of `A₀` in the full (N+1)-term combination.
    pub fn base_weight(&self) -> f64 {
        1.0 - self.0.iter().sum::<f64>()
    }

    /// All N+1 weights, `A₀` first. They sum to one.
    pub fn full_weights(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.0.len() + 1);
        w.push(self.base_weight());
        w.extend_from_slice(&self.0);
        w
    }
}

/// `A₀` together with an ordered list of perturbations; member `i ≥ 1` is
/// `A₀` plus perturbation `i − 1`.
#[derive(Debug, Clone)]
pub struct RepresentationFamily<P> {
    problem: P,
    perturbations: Vec<PerturbationSpec>,
}

impl<P: ControlProblem> RepresentationFamily<P> {
    pub fn new(problem: P, perturbations: Vec<PerturbationSpec>) -> Result<Self, ModelError> {
        let d = problem.state_dim();
        for (i, p) in perturbations.iter().enumerate() {
            if !p.fits(d) {
                return Err(ModelError::IndexOutOfRange);
            }
            if p.col_lo >= p.col_hi || p.c == 0.0 || !p.c.is_finite() {
                return Err(ModelError::InvalidPerturbation);
            }
            if perturbations[..i].contains(p) {
                return Err(ModelError::DuplicatePerturbation);
            }
        }
        Ok(Self {
            problem,
            perturbations,
        })
    }

    /// Only `A₀`.
    pub fn base_only(problem: P) -> Self {
        Self {
            problem,
            perturbations: Vec::new(),
        }
    }

    /// Every `(row, col_lo < col_hi, c)` in lexicographic order:
    /// `d²(d−1)|C|/2` members.
    pub fn generate_full(problem: P, c_set: &[f64]) -> Result<Self, ModelError> {
        let bad = c_set.is_empty()
            || c_set.iter().any(|c| *c == 0.0 || !c.is_finite())
            || c_set
                .iter()
                .enumerate()
                .any(|(i, c)| c_set[..i].contains(c));
        if bad {
            return Err(ModelError::InvalidConstantSet);
        }
        let d = problem.state_dim();
        let mut perturbations = Vec::with_capacity(d * d * (d.saturating_sub(1)) * c_set.len() / 2);
        for row in 0..d {
            for col_lo in 0..d {
                for col_hi in (col_lo + 1)..d {
                    for &c in c_set {
                        perturbations.push(PerturbationSpec {
                            row,
                            col_lo,
                            col_hi,
                            c,
                        });
                    }
                }
            }
        }
        Ok(Self {
            problem,
            perturbations,
        })
    }

    pub fn problem(&self) -> &P {
        &self.problem
    }

    pub fn perturbations(&self) -> &[PerturbationSpec] {
        &self.perturbations
    }

    /// Number of perturbed members N (excluding `A₀`).
    pub fn len(&self) -> usize {
        self.perturbations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perturbations.is_empty()
    }

    pub fn state_dim(&self) -> usize {
        self.problem.state_dim()
    }

    fn check_state(&self, x: &Vector) -> Result<(), ModelError> {
        if x.len() != self.state_dim() {
            return Err(ModelError::DimensionMismatch);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        Ok(())
    }

    fn check_alpha(&self, alpha: &Coefficients) -> Result<(), ModelError> {
        if alpha.len() == self.len() {
            Ok(())
        } else {
            Err(ModelError::DimensionMismatch)
        }
    }

    /// Member `i` at `x`; `i = 0` is `A₀`.
    pub fn member_rep(&self, i: usize, x: &Vector) -> Result<Matrix, ModelError> {
        if i > self.len() {
            return Err(ModelError::IndexOutOfRange);
        }
        self.check_state(x)?;
        let mut a = self.problem.base_rep(x);
        if i > 0 {
            self.perturbations[i - 1].apply(&mut a, x, 1.0);
        }
        Ok(a)
    }

    /// `𝒜(x, α) = (1 − Σαᵢ)A₀(x) + Σαᵢ Aᵢ(x)`.
    ///
    /// Evaluated as `A₀(x) + Σαᵢ Pᵢ(x)`, which is the same matrix with the
    /// `A₀` weights cancelled exactly.
    pub fn combine(&self, alpha: &Coefficients, x: &Vector) -> Result<Matrix, ModelError> {
        self.check_alpha(alpha)?;
        self.check_state(x)?;
        let mut a = self.problem.base_rep(x);
        for (p, &w) in self.perturbations.iter().zip(alpha.as_slice()) {
            if w != 0.0 {
                p.apply(&mut a, x, w);
            }
        }
        Ok(a)
    }

    /// `∂𝒜(x, α)/∂x_k`.
    pub fn combine_jacobian(
        &self,
        alpha: &Coefficients,
        x: &Vector,
        k: usize,
    ) -> Result<Matrix, ModelError> {
        if k >= self.state_dim() {
            return Err(ModelError::IndexOutOfRange);
        }
        self.check_alpha(alpha)?;
        self.check_state(x)?;
        let mut a = self.problem.base_rep_jacobian(x, k);
        for (p, &w) in self.perturbations.iter().zip(alpha.as_slice()) {
            if w != 0.0 {
                p.apply_jacobian(&mut a, k, w);
            }
        }
        Ok(a)
    }

    /// Index (zero-based, into [`perturbations`](Self::perturbations)) of `p`.
    pub fn position(&self, p: &PerturbationSpec) -> Option<usize> {
        self.perturbations.iter().position(|q| q == p)
    }
}
