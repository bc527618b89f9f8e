//! Eigenvalues of general complex matrices: Householder reduction to upper
//! Hessenberg form followed by Wilkinson-shifted QR sweeps with Givens
//! rotations. Only eigenvalues are produced, so each sweep is confined to the
//! active unreduced block.

use alloc::vec;
use alloc::vec::Vec;

use super::{CMatrix, LinalgError};
use crate::float::{cabs1, sqrt};
use crate::C64;

/// Iteration cap per unit of matrix order.
pub const MAX_SWEEPS_PER_ORDER: usize = 100;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// All `n` eigenvalues of `m`, repeated according to algebraic multiplicity,
/// in no particular order.
pub fn eig_dense(m: &CMatrix) -> Result<Vec<C64>, LinalgError> {
    m.check_finite()?;
    let n = m.order();
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let mut h = m.as_slice().to_vec();
    if !is_hessenberg(&h, n) {
        reduce_to_hessenberg(&mut h, n);
    }
    hessenberg_eigenvalues(&mut h, n).map_err(|sweeps| LinalgError::NoConvergence {
        sweeps,
        matrix: m.clone(),
    })
}

fn is_hessenberg(h: &[C64], n: usize) -> bool {
    (2..n).all(|i| (0..i - 1).all(|j| h[i * n + j] == ZERO))
}

fn reduce_to_hessenberg(h: &mut [C64], n: usize) {
    let mut v = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| h[i * n + k].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1) * n + k];
        let xnorm = sqrt(tail + x0.norm_sqr());
        // alpha = -phase(x0)·‖x‖ avoids cancellation in v0 = x0 - alpha.
        let phase = if x0 == ZERO { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = h[i * n + k];
        }
        let vnorm = sqrt((k + 1..n).map(|i| v[i].norm_sqr()).sum());
        for vi in v.iter_mut().take(n).skip(k + 1) {
            *vi /= vnorm;
        }
        // H <- (I - 2vv*) H
        for j in k..n {
            let mut s = ZERO;
            for i in k + 1..n {
                s += v[i].conj() * h[i * n + j];
            }
            s *= 2.0;
            for i in k + 1..n {
                h[i * n + j] -= v[i] * s;
            }
        }
        // H <- H (I - 2vv*)
        for i in 0..n {
            let mut s = ZERO;
            for j in k + 1..n {
                s += h[i * n + j] * v[j];
            }
            s *= 2.0;
            for j in k + 1..n {
                h[i * n + j] -= s * v[j].conj();
            }
        }
        h[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            h[i * n + k] = ZERO;
        }
    }
}

/// Eigenvalue of the 2x2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm_sqr() <= (l2 - d).norm_sqr() {
        l1
    } else {
        l2
    }
}

/// On failure returns the number of sweeps spent.
fn hessenberg_eigenvalues(h: &mut [C64], n: usize) -> Result<Vec<C64>, usize> {
    let ulp = f64::EPSILON;
    let small = f64::MIN_POSITIVE * (n as f64 / ulp);
    let cap = MAX_SWEEPS_PER_ORDER * n;
    let scale = h.iter().map(|z| cabs1(*z)).fold(0.0, f64::max);

    let mut eig = vec![ZERO; n];
    let mut rot: Vec<(f64, C64)> = vec![(1.0, ZERO); n];
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut its = 0usize;

    loop {
        if hi == 0 {
            eig[0] = h[0];
            return Ok(eig);
        }
        let mut lo = hi;
        while lo > 0 {
            let sub = cabs1(h[lo * n + lo - 1]);
            if sub <= small {
                break;
            }
            let mut tst = cabs1(h[(lo - 1) * n + lo - 1]) + cabs1(h[lo * n + lo]);
            if tst == 0.0 {
                tst = scale;
            }
            if sub <= ulp * tst {
                break;
            }
            lo -= 1;
        }
        if lo > 0 {
            h[lo * n + lo - 1] = ZERO;
        }
        if lo == hi {
            eig[hi] = h[hi * n + hi];
            hi -= 1;
            its = 0;
            continue;
        }
        if sweeps >= cap {
            return Err(sweeps);
        }
        sweeps += 1;
        its += 1;

        let d = h[hi * n + hi];
        let shift = if its % 10 == 0 {
            // exceptional shift to break cycles
            d + cabs1(h[hi * n + hi - 1]) * 0.75
        } else {
            wilkinson_shift(
                h[(hi - 1) * n + hi - 1],
                h[(hi - 1) * n + hi],
                h[hi * n + hi - 1],
                d,
            )
        };

        for k in lo..=hi {
            h[k * n + k] -= shift;
        }
        // Q* (H - σI) = R
        for k in lo..hi {
            let a = h[k * n + k];
            let b = h[(k + 1) * n + k];
            let r = crate::float::hypot(a.norm(), b.norm());
            let (c, s) = if r == 0.0 {
                (1.0, ZERO)
            } else if a == ZERO {
                (0.0, b.conj() / b.norm())
            } else {
                let an = a.norm();
                (an / r, (a / an) * b.conj() / r)
            };
            rot[k] = (c, s);
            for j in k..=hi {
                let x = h[k * n + j];
                let y = h[(k + 1) * n + j];
                h[k * n + j] = x * c + s * y;
                h[(k + 1) * n + j] = -s.conj() * x + y * c;
            }
        }
        // R Q + σI
        for k in lo..hi {
            let (c, s) = rot[k];
            for i in lo..=(k + 1) {
                let x = h[i * n + k];
                let y = h[i * n + k + 1];
                h[i * n + k] = x * c + y * s.conj();
                h[i * n + k + 1] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[k * n + k] += shift;
        }
    }
}
