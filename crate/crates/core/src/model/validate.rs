use alloc::vec::Vec;

use nalgebra::linalg::SymmetricEigen;

use super::{ControlProblem, Vector};
use crate::linalg::Matrix;

const FD_REL_STEP: f64 = 1e-6;
const FD_REL_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianSource {
    /// `∂A₀/∂x_k`
    BaseRep,
    /// `∂B/∂x_k`
    InputMap,
}

/// One violation found by [`validate_problem`].
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    JacobianMismatch {
        sample: usize,
        state: Vec<f64>,
        source: JacobianSource,
        k: usize,
        row: usize,
        col: usize,
        analytic: f64,
        finite_difference: f64,
    },
    ShapeMismatch {
        sample: usize,
        what: &'static str,
    },
    NonFinite {
        sample: usize,
        state: Vec<f64>,
    },
    CostNotSymmetric {
        asymmetry: f64,
    },
    CostNotPsd {
        min_eigenvalue: f64,
    },
}

/// Checks analytic Jacobians against central differences at each sample
/// and `Q` for symmetry and semidefiniteness. Returns every violation.
pub fn validate_problem<P: ControlProblem + ?Sized>(
    problem: &P,
    samples: &[Vector],
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let d = problem.state_dim();
    let m = problem.input_dim();

    let q = problem.cost_weight();
    if q.shape() != (d, d) {
        out.push(Diagnostic::ShapeMismatch {
            sample: 0,
            what: "cost weight",
        });
    } else {
        let asymmetry = (q - q.transpose()).norm();
        if asymmetry > 1e-12 * q.norm().max(1.0) {
            out.push(Diagnostic::CostNotSymmetric { asymmetry });
        }
        let min_eigenvalue = SymmetricEigen::new(crate::linalg::symmetrize(q))
            .eigenvalues
            .min();
        if min_eigenvalue < -1e-12 * q.norm().max(1.0) {
            out.push(Diagnostic::CostNotPsd { min_eigenvalue });
        }
    }

    for (sample, x) in samples.iter().enumerate() {
        if x.len() != d {
            out.push(Diagnostic::ShapeMismatch {
                sample,
                what: "state",
            });
            continue;
        }
        for (source, cols) in [(JacobianSource::BaseRep, d), (JacobianSource::InputMap, m)] {
            let eval = |y: &Vector| match source {
                JacobianSource::BaseRep => problem.base_rep(y),
                JacobianSource::InputMap => problem.input_map(y),
            };
            let center = eval(x);
            if center.shape() != (d, cols) {
                out.push(Diagnostic::ShapeMismatch {
                    sample,
                    what: match source {
                        JacobianSource::BaseRep => "base representation",
                        JacobianSource::InputMap => "input map",
                    },
                });
                continue;
            }
            if center.iter().any(|v| !v.is_finite()) {
                out.push(Diagnostic::NonFinite {
                    sample,
                    state: x.iter().copied().collect(),
                });
                continue;
            }
            for k in 0..d {
                let analytic: Matrix = match source {
                    JacobianSource::BaseRep => problem.base_rep_jacobian(x, k),
                    JacobianSource::InputMap => problem.input_map_jacobian(x, k),
                };
                if analytic.shape() != (d, cols) {
                    out.push(Diagnostic::ShapeMismatch {
                        sample,
                        what: "jacobian",
                    });
                    continue;
                }
                let h = FD_REL_STEP * x[k].abs().max(1.0);
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                let numeric = (eval(&xp) - eval(&xm)) / (xp[k] - xm[k]);
                for row in 0..d {
                    for col in 0..cols {
                        let a = analytic[(row, col)];
                        let n = numeric[(row, col)];
                        let scale = a.abs().max(n.abs()).max(1.0);
                        if !((a - n).abs() <= FD_REL_TOL * scale) {
                            out.push(Diagnostic::JacobianMismatch {
                                sample,
                                state: x.iter().copied().collect(),
                                source,
                                k,
                                row,
                                col,
                                analytic: a,
                                finite_difference: n,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}
