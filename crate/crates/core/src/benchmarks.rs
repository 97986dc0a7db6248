//! The controlled Lorenz system and the cart-mounted inverted pendulum.

use libm::{cos, sin};

use crate::linalg::Matrix;
use crate::model::{ControlProblem, PerturbationSpec, Vector};

pub const LORENZ_NAME: &str = "lorenz";
pub const PENDULUM_NAME: &str = "inverted-pendulum";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzParams {
    pub sigma: f64,
    pub beta: f64,
    pub rho: f64,
    /// `Q = q_scale · I₃`.
    pub q_scale: f64,
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self {
            sigma: 10.0,
            beta: 8.0 / 3.0,
            rho: 2.0,
            q_scale: 100.0,
        }
    }
}

/// `ẋ = σ(y − x)`, `ẏ = x(ρ − z) − y + u`, `ż = xy − βz` with
/// `A₀ = [[−σ, σ, 0], [ρ − z, −1, 0], [y, 0, −β]]`.
#[derive(Debug, Clone)]
pub struct Lorenz {
    params: LorenzParams,
    q: Matrix,
}

impl Lorenz {
    pub fn new(params: LorenzParams) -> Option<Self> {
        let ok = params.sigma > 0.0
            && params.beta > 0.0
            && params.rho.is_finite()
            && params.q_scale >= 0.0
            && params.q_scale.is_finite();
        ok.then(|| Self {
            q: Matrix::identity(3, 3) * params.q_scale,
            params,
        })
    }

    pub fn params(&self) -> &LorenzParams {
        &self.params
    }
}

impl ControlProblem for Lorenz {
    fn name(&self) -> &str {
        LORENZ_NAME
    }
    fn state_dim(&self) -> usize {
        3
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn base_rep(&self, x: &Vector) -> Matrix {
        let LorenzParams {
            sigma, beta, rho, ..
        } = self.params;
        Matrix::from_row_slice(
            3,
            3,
            &[
                -sigma, sigma, 0.0, //
                rho - x[2], -1.0, 0.0, //
                x[1], 0.0, -beta,
            ],
        )
    }
    fn base_rep_jacobian(&self, _x: &Vector, k: usize) -> Matrix {
        let mut j = Matrix::zeros(3, 3);
        match k {
            1 => j[(2, 0)] = 1.0,
            2 => j[(1, 0)] = -1.0,
            _ => {}
        }
        j
    }
    fn input_map(&self, _x: &Vector) -> Matrix {
        Matrix::from_row_slice(3, 1, &[0.0, 1.0, 0.0])
    }
    fn input_map_jacobian(&self, _x: &Vector, _k: usize) -> Matrix {
        Matrix::zeros(3, 1)
    }
    fn cost_weight(&self) -> &Matrix {
        &self.q
    }
    fn drift(&self, x: &Vector) -> Vector {
        let LorenzParams {
            sigma, beta, rho, ..
        } = self.params;
        Vector::from_vec(alloc::vec![
            sigma * (x[1] - x[0]),
            x[0] * (rho - x[2]) - x[1],
            x[0] * x[1] - beta * x[2],
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumParams {
    /// Cart mass `M` (kg).
    pub cart_mass: f64,
    /// Pendulum mass `m` (kg).
    pub pole_mass: f64,
    /// Length `ℓ` (m).
    pub length: f64,
    /// `g` (m/s²).
    pub gravity: f64,
}

impl Default for PendulumParams {
    fn default() -> Self {
        Self {
            cart_mass: 0.5,
            pole_mass: 0.45,
            length: 0.5,
            gravity: 9.81,
        }
    }
}

/// Below this angle `sin(θ)/θ` is evaluated by its Taylor series.
pub const SINC_SERIES_CUTOFF: f64 = 1e-4;
const SINC_DERIV_SERIES_CUTOFF: f64 = 1e-2;

/// `sin(θ)/θ`.
pub fn sinc(theta: f64) -> f64 {
    if theta.abs() < SINC_SERIES_CUTOFF {
        let t2 = theta * theta;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        sin(theta) / theta
    }
}

/// `d/dθ (sin(θ)/θ)`.
pub fn sinc_derivative(theta: f64) -> f64 {
    if theta.abs() < SINC_DERIV_SERIES_CUTOFF {
        let t2 = theta * theta;
        theta * (-1.0 / 3.0 + t2 * (1.0 / 30.0 + t2 * (-1.0 / 840.0 + t2 / 45360.0)))
    } else {
        (theta * cos(theta) - sin(theta)) / (theta * theta)
    }
}

/// Cart-pole with state `(x₁, x₂, x₃, x₄)` = (cart position, tilt angle,
/// cart velocity, angular velocity) and
///
/// ```text
/// A₀ = [[0, 0, 1, 0], [0, 0, 0, 1], [0, a₃₂, 0, 0], [0, a₄₂, 0, a₄₄]]
/// a₃₂ = m·s(ℓx₄ − g·cos x₂)/c     a₄₂ = s(M + m)g/(ℓc)
/// a₄₄ = −m·x₄·sin x₂·cos x₂/c     B = (0, 0, 1/c, −cos x₂/(ℓc))ᵀ
/// s = sin x₂/x₂                   c = M + m·sin² x₂
/// ```
///
/// The `ℓx₄` factor in `a₃₂` is kept as given even though the textbook
/// cart-pole has `ℓx₄²` there.
#[derive(Debug, Clone)]
pub struct InvertedPendulum {
    params: PendulumParams,
    q: Matrix,
}

impl InvertedPendulum {
    pub fn new(params: PendulumParams) -> Option<Self> {
        let ok = params.cart_mass > 0.0
            && params.pole_mass >= 0.0
            && params.length > 0.0
            && params.gravity.is_finite()
            && params.cart_mass.is_finite()
            && params.pole_mass.is_finite()
            && params.length.is_finite();
        ok.then(|| Self {
            q: Matrix::from_diagonal(&Vector::from_vec(alloc::vec![1.0, 10.0, 0.1, 0.1])),
            params,
        })
    }

    pub fn params(&self) -> &PendulumParams {
        &self.params
    }

    fn c(&self, theta: f64) -> f64 {
        let s = sin(theta);
        self.params.cart_mass + self.params.pole_mass * s * s
    }

    fn c_prime(&self, theta: f64) -> f64 {
        2.0 * self.params.pole_mass * sin(theta) * cos(theta)
    }
}

impl ControlProblem for InvertedPendulum {
    fn name(&self) -> &str {
        PENDULUM_NAME
    }
    fn state_dim(&self) -> usize {
        4
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn base_rep(&self, x: &Vector) -> Matrix {
        let PendulumParams {
            cart_mass: big_m,
            pole_mass: m,
            length: l,
            gravity: g,
        } = self.params;
        let (th, om) = (x[1], x[3]);
        let s = sinc(th);
        let c = self.c(th);
        let mut a = Matrix::zeros(4, 4);
        a[(0, 2)] = 1.0;
        a[(1, 3)] = 1.0;
        a[(2, 1)] = m * s * (l * om - g * cos(th)) / c;
        a[(3, 1)] = s * (big_m + m) * g / (l * c);
        a[(3, 3)] = -m * om * sin(th) * cos(th) / c;
        a
    }
    fn base_rep_jacobian(&self, x: &Vector, k: usize) -> Matrix {
        let PendulumParams {
            cart_mass: big_m,
            pole_mass: m,
            length: l,
            gravity: g,
        } = self.params;
        let (th, om) = (x[1], x[3]);
        let mut j = Matrix::zeros(4, 4);
        match k {
            1 => {
                let s = sinc(th);
                let ds = sinc_derivative(th);
                let c = self.c(th);
                let dc = self.c_prime(th);
                let lever = l * om - g * cos(th);
                j[(2, 1)] = m * (ds * lever / c + s * g * sin(th) / c - s * lever * dc / (c * c));
                j[(3, 1)] = (big_m + m) * g / l * (ds / c - s * dc / (c * c));
                let sc = sin(th) * cos(th);
                let dsc = cos(2.0 * th);
                j[(3, 3)] = -m * om * (dsc / c - sc * dc / (c * c));
            }
            3 => {
                let c = self.c(th);
                j[(2, 1)] = m * sinc(th) * l / c;
                j[(3, 3)] = -m * sin(th) * cos(th) / c;
            }
            _ => {}
        }
        j
    }
    fn input_map(&self, x: &Vector) -> Matrix {
        let th = x[1];
        let c = self.c(th);
        Matrix::from_row_slice(4, 1, &[0.0, 0.0, 1.0 / c, -cos(th) / (self.params.length * c)])
    }
    fn input_map_jacobian(&self, x: &Vector, k: usize) -> Matrix {
        let mut j = Matrix::zeros(4, 1);
        if k == 1 {
            let th = x[1];
            let c = self.c(th);
            let dc = self.c_prime(th);
            j[(2, 0)] = -dc / (c * c);
            j[(3, 0)] = (sin(th) * c + cos(th) * dc) / (self.params.length * c * c);
        }
        j
    }
    fn cost_weight(&self) -> &Matrix {
        &self.q
    }
}

/// The one-based `(2, 2, 4, −1)` perturbation: `[Ã]₂,₂ = [A₀]₂,₂ − x₄` and
/// `[Ã]₂,₄ = [A₀]₂,₄ + x₂`.
pub fn pendulum_paper_perturbation() -> PerturbationSpec {
    PerturbationSpec::from_one_based(2, 2, 4, -1.0).expect("valid constant perturbation")
}
