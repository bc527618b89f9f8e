//! Self-adjoint eigenvalue paths used by the numerical range code.

use alloc::vec::Vec;

use super::CMatrix;
use crate::float::sqrt;
use crate::C64;

const MAX_SWEEPS: usize = 60;

/// Eigenvalues of a Hermitian matrix (only the upper triangle and the real
/// part of the diagonal are read), in increasing order. Cyclic Jacobi.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let n = h.order();
    let mut a = CMatrix::from_fn(n, |i, j| {
        if i == j {
            C64::new(h[(i, i)].re, 0.0)
        } else if i < j {
            h[(i, j)]
        } else {
            h[(j, i)].conj()
        }
    });
    let total = a.norm_fro();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if sqrt(off) <= f64::EPSILON * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // make a_pq real: conjugate by diag(.., e^{-iφ} at q, ..)
                let ph = apq.conj() / r;
                for k in 0..n {
                    a[(k, q)] *= ph;
                }
                for k in 0..n {
                    a[(q, k)] *= ph.conj();
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let x = a[(k, p)];
                    let y = a[(k, q)];
                    a[(k, p)] = x * c - y * s;
                    a[(k, q)] = x * s + y * c;
                }
                for k in 0..n {
                    let x = a[(p, k)];
                    let y = a[(q, k)];
                    a[(p, k)] = x * c - y * s;
                    a[(q, k)] = x * s + y * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    ev
}

/// Largest eigenvalue of the Hermitian tridiagonal matrix with real diagonal
/// `diag` and off-diagonal moduli squared `off_sq`, by Sturm-count bisection.
pub fn hermitian_tridiag_max_eigenvalue(diag: &[f64], off_sq: &[f64]) -> f64 {
    let n = diag.len();
    assert_eq!(off_sq.len(), n.saturating_sub(1));
    if n == 1 {
        return diag[0];
    }
    // Gershgorin interval
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += sqrt(off_sq[i - 1]);
        }
        if i + 1 < n {
            r += sqrt(off_sq[i]);
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * scale);
    let tol = 2.0 * f64::EPSILON * scale;
    // invariant: count_below(lo) ≤ n-1 < count_below(hi)
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(diag, off_sq, mid, pivmin) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Number of eigenvalues strictly less than `x`.
fn count_below(diag: &[f64], off_sq: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut d = diag[0] - x;
    if d.abs() < pivmin {
        d = -pivmin;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        d = diag[i] - x - off_sq[i - 1] / d;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}
