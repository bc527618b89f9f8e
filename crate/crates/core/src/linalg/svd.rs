//! Singular values by one-sided (Hestenes) Jacobi rotations.
//!
//! Column pairs are orthogonalised until every pair is numerically
//! orthogonal; the singular values are then the column norms. This is slower
//! than bidiagonalisation for large orders but keeps full accuracy for the
//! smallest singular value, which is the quantity the pseudospectral
//! machinery depends on.

use alloc::vec::Vec;

use super::CMatrix;
use crate::float::sqrt;
use crate::C64;

const MAX_SWEEPS: usize = 80;

/// Singular values of `m`, sorted in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let n = m.order();
    // column-major copy
    let mut cols: Vec<C64> = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cols.push(m[(i, j)]);
        }
    }
    jacobi_orthogonalize(&mut cols, n);
    let mut sv: Vec<f64> = (0..n)
        .map(|j| sqrt(cols[j * n..(j + 1) * n].iter().map(|z| z.norm_sqr()).sum()))
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    sv
}

/// Smallest singular value of `m`.
pub fn smin_dense(m: &CMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

fn jacobi_orthogonalize(cols: &mut [C64], n: usize) {
    let tol = f64::EPSILON * sqrt(n as f64);
    // Columns shorter than this carry no information above rounding level.
    let frob_sq: f64 = cols.iter().map(|z| z.norm_sqr()).sum();
    let floor = f64::EPSILON * f64::EPSILON * frob_sq;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (left, right) = cols.split_at_mut(q * n);
                let ap = &mut left[p * n..(p + 1) * n];
                let aq = &mut right[..n];
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for i in 0..n {
                    alpha += ap[i].norm_sqr();
                    beta += aq[i].norm_sqr();
                    gamma += ap[i].conj() * aq[i];
                }
                let g = gamma.norm();
                if g == 0.0 || alpha <= floor || beta <= floor || g <= tol * sqrt(alpha) * sqrt(beta) {
                    continue;
                }
                rotated = true;
                // Rotate a_q by the phase of gamma so the pair's inner product is real.
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..n {
                    let x = ap[i];
                    let y = aq[i] * phase;
                    ap[i] = x * c - y * s;
                    aq[i] = x * s + y * c;
                }
            }
        }
        if !rotated {
            return;
        }
    }
    log::warn!("one-sided Jacobi SVD hit the sweep cap at order {n}");
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_has_unit_smin() {
        for n in 1..8 {
            assert!((smin_dense(&CMatrix::identity(n)) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn order_two_hopping_is_orthogonal() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!((smin_dense(&m) - 1.0).abs() < 1e-15);
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert!((smin_dense(&m) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_case_is_modulus() {
        let lam = c(0.3, -1.7);
        let m = CMatrix::zeros(1).shifted(lam);
        assert!((smin_dense(&m) - lam.norm()).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_gives_zero() {
        let m = CMatrix::from_row_major(vec![c(1.0, 1.0), c(2.0, 2.0), c(1.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        assert!(smin_dense(&m) < 1e-15);
    }

    #[test]
    fn two_by_two_closed_form() {
        // For real 2x2 [[a,b],[c,d]]: σ_min² = (F - sqrt(F² - 4 det²)) / 2, F = ‖M‖_F²
        let m = CMatrix::from_real_rows(&[&[-1.0, 1.0], &[-1.0, -1.0]]).unwrap();
        let f: f64 = 4.0;
        let det: f64 = 2.0;
        let want = sqrt((f - sqrt(f * f - 4.0 * det * det)) / 2.0);
        assert!((smin_dense(&m) - want).abs() < 1e-15);
    }

    fn arb_matrix() -> impl Strategy<Value = CMatrix> {
        (1usize..9).prop_flat_map(|n| {
            proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n).prop_map(|v| {
                CMatrix::from_row_major(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn invariant_under_transpose_and_adjoint(m in arb_matrix()) {
            let s = smin_dense(&m);
            let tol = 1e-12 * (1.0 + s);
            prop_assert!((smin_dense(&m.transpose()) - s).abs() <= tol);
            prop_assert!((smin_dense(&m.adjoint()) - s).abs() <= tol);
        }

        #[test]
        fn shift_is_one_lipschitz(m in arb_matrix(), a in -3.0f64..3.0, b in -3.0f64..3.0,
                                  x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let l = c(a, b);
            let mu = c(x, y);
            let d = (smin_dense(&m.shifted(l)) - smin_dense(&m.shifted(mu))).abs();
            prop_assert!(d <= (l - mu).norm() + 1e-12);
        }

        #[test]
        fn squares_sum_to_frobenius(m in arb_matrix()) {
            let sv = singular_values(&m);
            let sum: f64 = sv.iter().map(|s| s * s).sum();
            let f = m.norm_fro();
            prop_assert!((sum - f * f).abs() <= 1e-12 * (1.0 + f * f));
        }
    }
}
