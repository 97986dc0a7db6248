//! Adaptive Dormand–Prince 5(4) integration for the closed-loop plant.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use libm::{pow, sqrt};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// First trial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_steps: 100_000,
            initial_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeError {
    /// The controller drove the step below the representable spacing at `t`.
    StepSizeUnderflow { t: f64 },
    MaxStepsExceeded { t: f64 },
    /// The right-hand side produced NaN or infinity at `t`.
    NonFinite { t: f64 },
}

impl OdeError {
    pub fn time(&self) -> f64 {
        match *self {
            OdeError::StepSizeUnderflow { t }
            | OdeError::MaxStepsExceeded { t }
            | OdeError::NonFinite { t } => t,
        }
    }
}

impl fmt::Display for OdeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OdeError::StepSizeUnderflow { t } => write!(f, "step size underflow at t = {t}"),
            OdeError::MaxStepsExceeded { t } => write!(f, "step limit exceeded at t = {t}"),
            OdeError::NonFinite { t } => write!(f, "non-finite state at t = {t}"),
        }
    }
}

impl core::error::Error for OdeError {}

fn error_norm(err: &[f64], y0: &[f64], y1: &[f64], opts: &OdeOptions) -> f64 {
    let n = err.len().max(1) as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = opts.abs_tol + opts.rel_tol * a.abs().max(b.abs());
            let r = e / sc;
            r * r
        })
        .sum();
    sqrt(sum / n)
}

/// Integrates `ẏ = rhs(t, y)` from `t0` to `t1` in place.
///
/// `observer` sees every accepted `(t, y)`, including the endpoint.
pub fn integrate<F, O>(
    mut rhs: F,
    t0: f64,
    t1: f64,
    y: &mut [f64],
    opts: &OdeOptions,
    mut observer: O,
) -> Result<OdeStats, OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]),
{
    let n = y.len();
    let mut stats = OdeStats::default();
    if t1 == t0 {
        return Ok(stats);
    }
    let dir = if t1 > t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];

    let mut t = t0;
    rhs(t, y, &mut k1);
    stats.evaluations += 1;
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(OdeError::NonFinite { t });
    }

    let mut h = match opts.initial_step {
        Some(h0) => h0.abs().min(span),
        None => initial_step(&mut rhs, t, y, &k1, dir, span, opts, &mut tmp, &mut k2, &mut stats),
    };

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(OdeError::MaxStepsExceeded { t });
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(span) {
            return Err(OdeError::StepSizeUnderflow { t });
        }
        let hs = dir * h;

        stage(&mut tmp, y, hs, &[(A21, &k1)]);
        rhs(t + C2 * hs, &tmp, &mut k2);
        stage(&mut tmp, y, hs, &[(A31, &k1), (A32, &k2)]);
        rhs(t + C3 * hs, &tmp, &mut k3);
        stage(&mut tmp, y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        rhs(t + C4 * hs, &tmp, &mut k4);
        stage(&mut tmp, y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        rhs(t + C5 * hs, &tmp, &mut k5);
        stage(
            &mut tmp,
            y,
            hs,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        rhs(t + hs, &tmp, &mut k6);
        stage(
            &mut y_new,
            y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let t_new = if last { t1 } else { t + hs };
        rhs(t_new, &y_new, &mut k7);
        stats.evaluations += 6;

        for i in 0..n {
            err[i] = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&err, y, &y_new, opts);

        if !en.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            stats.rejected += 1;
            h *= MIN_FACTOR;
            continue;
        }

        if en <= 1.0 {
            stats.accepted += 1;
            t = t_new;
            y.copy_from_slice(&y_new);
            core::mem::swap(&mut k1, &mut k7);
            observer(t, y);
            if last {
                return Ok(stats);
            }
            let factor = if en == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * pow(en, -0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h *= factor;
        } else {
            stats.rejected += 1;
            h *= (SAFETY * pow(en, -0.2)).clamp(MIN_FACTOR, 1.0);
        }
    }
}

fn stage(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &Vec<f64>)]) {
    for i in 0..out.len() {
        let mut acc = 0.0;
        for (a, k) in terms {
            acc += a * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Starting step from the usual two-evaluation heuristic.
#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    rhs: &mut F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    dir: f64,
    span: f64,
    opts: &OdeOptions,
    tmp: &mut [f64],
    f1: &mut [f64],
    stats: &mut OdeStats,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len().max(1) as f64;
    let scale = |i: usize| opts.abs_tol + opts.rel_tol * y[i].abs();
    let rms = |v: &[f64]| {
        sqrt(v.iter().enumerate().map(|(i, x)| (x / scale(i)) * (x / scale(i))).sum::<f64>() / n)
    };
    let d0 = rms(y);
    let d1 = rms(f0);
    let h0: f64 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
    .min(span);
    for i in 0..y.len() {
        tmp[i] = y[i] + dir * h0 * f0[i];
    }
    rhs(t + dir * h0, tmp, f1);
    stats.evaluations += 1;
    for i in 0..y.len() {
        tmp[i] = f1[i] - f0[i];
    }
    let d2 = rms(tmp) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        pow(0.01 / d1.max(d2), 0.2)
    };
    (100.0 * h0).min(h1).min(span)
}
