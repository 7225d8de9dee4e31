//! Eigenvalues of real nonsymmetric matrices: Householder reduction to
//! Hessenberg form, then implicit double-shift QR iteration, values only.
//! Follows the classic EISPACK orthes/hqr pair.

// the sweeps juggle several offset rows of h at once; keeping the reference
// index algebra beats iterator contortions here
#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;

/// One eigenvalue, re + i·im.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Largest matrix dimension the solver accepts.
pub const MAX_DIM: usize = 32;

/// Deflation threshold factor relative to the input norm.
const DEFLATION: f64 = 1e-12;

/// QR sweep budget: 100·d sweeps across the whole computation.
const SWEEPS_PER_DIM: usize = 100;

/// Computes all eigenvalues of a real square matrix (d ≤ 32).
pub fn compute(a: &Mat) -> Result<Vec<Complex>> {
    let d = a.rows();
    if d != a.cols() {
        return Err(Error::DimensionMismatch { expected: d, got: a.cols() });
    }
    if d == 0 || d > MAX_DIM {
        return Err(Error::InvalidParameter {
            name: "dim".into(),
            reason: format!("dimension must be in 1..={MAX_DIM}, got {d}"),
        });
    }
    if !a.is_finite() {
        return Err(Error::InvalidParameter {
            name: "A".into(),
            reason: "matrix entries must be finite".into(),
        });
    }

    let anorm = a.frobenius_norm();
    if anorm == 0.0 {
        return Ok(vec![Complex::new(0.0, 0.0); d]);
    }

    let mut h: Vec<Vec<f64>> = (0..d).map(|i| a.row(i).to_vec()).collect();
    hessenberg(&mut h);
    hqr(&mut h, DEFLATION * anorm)
}

/// In-place orthogonal reduction to upper Hessenberg form (Householder).
fn hessenberg(h: &mut [Vec<f64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];

    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            acc += ort[i] * ort[i];
        }
        let mut g = acc.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        let denom = acc - ort[m] * g;
        ort[m] -= g;

        // similarity transform H ← (I − uuᵀ/denom) H (I − uuᵀ/denom)
        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[i][j];
            }
            f /= denom;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[i][j];
            }
            f /= denom;
            for j in m..=high {
                h[i][j] -= f * ort[j];
            }
        }
        h[m][m - 1] = scale * g;
        for i in (m + 1)..=high {
            h[i][m - 1] = 0.0;
        }
    }
}

/// Double-shift QR iteration on an upper Hessenberg matrix; returns the
/// eigenvalues. Complex pairs are emitted as exact conjugates.
fn hqr(h: &mut [Vec<f64>], tol: f64) -> Result<Vec<Complex>> {
    let nn = h.len();
    let eps = 2f64.powi(-52);
    let cap = SWEEPS_PER_DIM * nn;
    let mut wr = vec![0.0; nn];
    let mut wi = vec![0.0; nn];

    let mut n = nn as isize - 1;
    let mut exshift = 0.0;
    let mut iter = 0usize;
    let mut sweeps = 0usize;

    while n >= 0 {
        let en = n as usize;

        // find the smallest l with a negligible subdiagonal below it
        let mut l = en;
        while l > 0 {
            if h[l][l - 1].abs() < tol {
                h[l][l - 1] = 0.0;
                break;
            }
            l -= 1;
        }

        if l == en {
            // one real root
            wr[en] = h[en][en] + exshift;
            wi[en] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == en {
            // a 2×2 block yields either two real roots or a conjugate pair
            let w = h[en][en - 1] * h[en - 1][en];
            let half_diff = (h[en - 1][en - 1] - h[en][en]) / 2.0;
            let disc = half_diff * half_diff + w;
            let z = disc.abs().sqrt();
            let x = h[en][en] + exshift;
            if disc >= 0.0 {
                let zz = if half_diff >= 0.0 { half_diff + z } else { half_diff - z };
                wr[en - 1] = x + zz;
                wr[en] = if zz != 0.0 { x - w / zz } else { wr[en - 1] };
                wi[en - 1] = 0.0;
                wi[en] = 0.0;
            } else {
                wr[en - 1] = x + half_diff;
                wr[en] = x + half_diff;
                wi[en - 1] = z;
                wi[en] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // no convergence at this corner yet: one double QR sweep
            sweeps += 1;
            if sweeps > cap {
                return Err(Error::EigenNoConvergence {
                    dim: nn,
                    residual: h[en][en - 1].abs(),
                });
            }

            let mut x = h[en][en];
            let mut y = h[en - 1][en - 1];
            let mut w = h[en][en - 1] * h[en - 1][en];

            if iter == 10 || iter == 20 {
                // exceptional shift to break symmetry-induced cycles
                exshift += x;
                for i in l..=en {
                    h[i][i] -= x;
                }
                let s = h[en][en - 1].abs() + h[en - 1][en - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            iter += 1;

            // look for two consecutive small subdiagonals
            let mut m = en - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = h[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[m + 1][m] + h[m][m + 1];
                q = h[m + 1][m + 1] - z - rr - ss;
                r = h[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[m][m - 1].abs() * (q.abs() + r.abs())
                    < eps * p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs())
                {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=en {
                h[i][i - 2] = 0.0;
                if i > m + 2 {
                    h[i][i - 3] = 0.0;
                }
            }

            // double QR step on rows l..=en, columns m..=en
            for k in m..en {
                let notlast = k != en - 1;
                let mut bulge_scale = 0.0;
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if notlast { h[k + 2][k - 1] } else { 0.0 };
                    bulge_scale = p.abs() + q.abs() + r.abs();
                    if bulge_scale == 0.0 {
                        continue;
                    }
                    p /= bulge_scale;
                    q /= bulge_scale;
                    r /= bulge_scale;
                }
                let mut s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s == 0.0 {
                    continue;
                }
                if k != m {
                    h[k][k - 1] = -s * bulge_scale;
                } else if l != m {
                    h[k][k - 1] = -h[k][k - 1];
                }
                p += s;
                let vx = p / s;
                let vy = q / s;
                let vz = r / s;
                q /= p;
                r /= p;

                for j in k..=en {
                    let mut f = h[k][j] + q * h[k + 1][j];
                    if notlast {
                        f += r * h[k + 2][j];
                        h[k + 2][j] -= f * vz;
                    }
                    h[k][j] -= f * vx;
                    h[k + 1][j] -= f * vy;
                }
                for i in l..=en.min(k + 3) {
                    let mut f = vx * h[i][k] + vy * h[i][k + 1];
                    if notlast {
                        f += vz * h[i][k + 2];
                        h[i][k + 2] -= f * r;
                    }
                    h[i][k] -= f;
                    h[i][k + 1] -= f * q;
                }
            }
        }
    }

    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex::new(re, im)).collect())
}
