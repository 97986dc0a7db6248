use nalgebra::linalg::Hessenberg;
use nalgebra::Complex;

use super::{CMatrix, LinalgError};

/// QR sweeps allowed per eigenvalue before giving up.
const SWEEPS_PER_EIGENVALUE: usize = 30;
/// Sweeps between exceptional shifts.
const EXCEPTIONAL_EVERY: usize = 10;

type C64 = Complex<f64>;

fn abs(z: C64) -> f64 {
    libm::sqrt(z.norm_sqr())
}

fn csqrt(z: C64) -> C64 {
    let r = abs(z);
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let re = libm::sqrt(0.5 * (r + z.re));
    let im = libm::sqrt(0.5 * (r - z.re));
    C64::new(re, if z.im < 0.0 { -im } else { im })
}

/// Rotation `[[c, s], [-s̄, c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let (na, nb) = (abs(a), abs(b));
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = libm::hypot(na, nb);
    (na / r, (a / na) * b.conj() / r)
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = csqrt(half * half + b * c);
    let m = (a + d) * 0.5;
    let (l1, l2) = (m + disc, m - disc);
    if abs(l1 - d) <= abs(l2 - d) {
        l1
    } else {
        l2
    }
}

/// Complex Schur form `M = Z T Zᴴ` whose diagonal can be reordered.
#[derive(Debug, Clone)]
pub struct OrderedSchur {
    /// Unitary basis.
    pub z: CMatrix,
    /// Upper-triangular factor.
    pub t: CMatrix,
}

impl OrderedSchur {
    /// Hessenberg reduction followed by shifted QR sweeps with deflation.
    pub fn new(m: CMatrix) -> Result<Self, LinalgError> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(LinalgError::DimensionMismatch);
        }
        let (mut z, mut t) = Hessenberg::new(m).unpack();
        let zero = C64::new(0.0, 0.0);
        let scale = t.iter().fold(0.0f64, |s, v| s.max(abs(*v)));
        let tiny = f64::MIN_POSITIVE * (n as f64) / f64::EPSILON;

        let mut rot: alloc::vec::Vec<(f64, C64)> = alloc::vec::Vec::with_capacity(n);
        let mut hi = n.saturating_sub(1);
        let mut sweeps = 0usize;
        let mut budget = SWEEPS_PER_EIGENVALUE * n.max(1);
        while hi > 0 {
            let mut lo = hi;
            while lo > 0 {
                let sub = abs(t[(lo, lo - 1)]);
                let mut diag = abs(t[(lo - 1, lo - 1)]) + abs(t[(lo, lo)]);
                if diag == 0.0 {
                    diag = scale;
                }
                if sub <= f64::EPSILON * diag || sub <= tiny {
                    t[(lo, lo - 1)] = zero;
                    break;
                }
                lo -= 1;
            }
            if lo == hi {
                hi -= 1;
                sweeps = 0;
                continue;
            }
            if budget == 0 {
                return Err(LinalgError::EigenFailure);
            }
            budget -= 1;
            sweeps += 1;

            let mu = if sweeps.is_multiple_of(EXCEPTIONAL_EVERY) {
                t[(hi, hi)] + C64::new(0.75 * abs(t[(hi, hi - 1)]), 0.0)
            } else {
                wilkinson(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
            };

            // One explicit QR step on the active block, applied as a
            // similarity to the whole matrix.
            for k in lo..=hi {
                t[(k, k)] -= mu;
            }
            rot.clear();
            for k in lo..hi {
                let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
                for j in k..n {
                    let (x, y) = (t[(k, j)], t[(k + 1, j)]);
                    t[(k, j)] = x * c + s * y;
                    t[(k + 1, j)] = -s.conj() * x + y * c;
                }
                t[(k + 1, k)] = zero;
                rot.push((c, s));
            }
            for (k, &(c, s)) in (lo..hi).zip(rot.iter()) {
                for i in 0..=(k + 1) {
                    let (u, v) = (t[(i, k)], t[(i, k + 1)]);
                    t[(i, k)] = u * c + v * s.conj();
                    t[(i, k + 1)] = -u * s + v * c;
                }
                for i in 0..n {
                    let (u, v) = (z[(i, k)], z[(i, k + 1)]);
                    z[(i, k)] = u * c + v * s.conj();
                    z[(i, k + 1)] = -u * s + v * c;
                }
            }
            for k in lo..=hi {
                t[(k, k)] += mu;
            }
        }
        for j in 0..n {
            for i in (j + 1)..n {
                t[(i, j)] = zero;
            }
        }
        Ok(Self { z, t })
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = Complex<f64>> + '_ {
        (0..self.t.nrows()).map(move |i| self.t[(i, i)])
    }

    /// Swaps diagonal entries `k` and `k + 1` with a unitary rotation.
    pub fn swap(&mut self, k: usize) {
        let n = self.t.nrows();
        let a = self.t[(k, k)];
        let b = self.t[(k, k + 1)];
        let c = self.t[(k + 1, k + 1)];
        // (b, c - a) spans the eigenvector of the trailing eigenvalue.
        let p0 = b;
        let q0 = c - a;
        let norm = libm::sqrt(p0.norm_sqr() + q0.norm_sqr());
        if norm == 0.0 {
            return;
        }
        let p = p0 / norm;
        let q = q0 / norm;
        // Z = [[p, -q̄], [q, p̄]]
        let z00 = p;
        let z01 = -q.conj();
        let z10 = q;
        let z11 = p.conj();

        // T ← Zᴴ T on rows k, k+1
        for j in 0..n {
            let r0 = self.t[(k, j)];
            let r1 = self.t[(k + 1, j)];
            self.t[(k, j)] = z00.conj() * r0 + z10.conj() * r1;
            self.t[(k + 1, j)] = z01.conj() * r0 + z11.conj() * r1;
        }
        // T ← T Z and basis ← basis Z on columns k, k+1
        for mat in [&mut self.t, &mut self.z] {
            for i in 0..n {
                let c0 = mat[(i, k)];
                let c1 = mat[(i, k + 1)];
                mat[(i, k)] = c0 * z00 + c1 * z10;
                mat[(i, k + 1)] = c0 * z01 + c1 * z11;
            }
        }
        self.t[(k + 1, k)] = Complex::new(0.0, 0.0);
    }

    /// Moves every eigenvalue satisfying `leading` ahead of the rest,
    /// preserving relative order within each group. Returns how many lead.
    pub fn reorder<F>(&mut self, leading: F) -> usize
    where
        F: Fn(Complex<f64>) -> bool,
    {
        let n = self.t.nrows();
        let mut placed = 0;
        for i in 0..n {
            if leading(self.t[(i, i)]) {
                let mut k = i;
                while k > placed {
                    self.swap(k - 1);
                    k -= 1;
                }
                placed += 1;
            }
        }
        placed
    }
}
