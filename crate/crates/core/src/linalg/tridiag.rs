//! Smallest singular value of a tridiagonal matrix in O(n) per iteration.
//!
//! `T` is factored once with partial pivoting (the `U` factor gains a second
//! super-diagonal); inverse power iteration then applies `(T T*)⁻¹` through
//! two triangular sweeps per step. The Rayleigh quotient `‖T⁻¹x‖²` increases
//! monotonically to `1/s_min²`, so the estimate `1/‖T⁻¹x‖` approaches `s_min`
//! from above.

use alloc::vec;
use alloc::vec::Vec;

use super::{smin_dense, TridiagC};
use crate::float::{cabs1, sqrt};
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Iteration cap before falling back to the dense SVD.
pub const MAX_ITERATIONS: usize = 200;
/// Relative accuracy target on the singular value estimate.
pub const REL_TOL: f64 = 1e-13;

/// LU factorization of a tridiagonal matrix with row interchanges.
#[derive(Debug, Clone)]
pub struct TridiagLu {
    dl: Vec<C64>,
    d: Vec<C64>,
    du: Vec<C64>,
    du2: Vec<C64>,
    swapped: Vec<bool>,
    singular: bool,
}

impl TridiagLu {
    pub fn new(t: &TridiagC) -> Self {
        let n = t.order();
        let mut dl = t.sub.clone();
        let mut d = t.diag.clone();
        let mut du = t.sup.clone();
        let mut du2 = vec![ZERO; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if cabs1(d[i]) >= cabs1(dl[i]) {
                if d[i] != ZERO {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        let singular = d.contains(&ZERO);
        TridiagLu {
            dl,
            d,
            du,
            du2,
            swapped,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Overwrites `b` with `T⁻¹ b`.
    pub fn solve(&self, b: &mut [C64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if !self.swapped[i] {
                let t = b[i];
                b[i + 1] -= self.dl[i] * t;
            } else {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    /// Overwrites `b` with `T⁻* b`.
    pub fn solve_adjoint(&self, b: &mut [C64]) {
        let n = self.d.len();
        b[0] /= self.d[0].conj();
        if n > 1 {
            b[1] = (b[1] - self.du[0].conj() * b[0]) / self.d[1].conj();
        }
        for i in 2..n {
            b[i] = (b[i] - self.du[i - 1].conj() * b[i - 1] - self.du2[i - 2].conj() * b[i - 2])
                / self.d[i].conj();
        }
        for i in (0..n - 1).rev() {
            if !self.swapped[i] {
                let t = b[i + 1];
                b[i] -= self.dl[i].conj() * t;
            } else {
                let temp = b[i + 1];
                b[i + 1] = b[i] - self.dl[i].conj() * temp;
                b[i] = temp;
            }
        }
    }
}

/// Outcome of [`smin_tridiag_detailed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TridiagSmin {
    pub value: f64,
    pub iterations: usize,
    /// The iteration did not converge and the dense SVD supplied the value.
    pub fell_back: bool,
}

/// Smallest singular value of `t`; agrees with [`smin_dense`] on `t.to_dense()`.
pub fn smin_tridiag(t: &TridiagC) -> f64 {
    smin_tridiag_detailed(t).value
}

pub fn smin_tridiag_detailed(t: &TridiagC) -> TridiagSmin {
    let n = t.order();
    if n == 1 {
        return TridiagSmin {
            value: t.diag[0].norm(),
            iterations: 0,
            fell_back: false,
        };
    }
    let lu = TridiagLu::new(t);
    if lu.is_singular() {
        return TridiagSmin {
            value: 0.0,
            iterations: 0,
            fell_back: false,
        };
    }

    let mut x = start_vector(n);
    let mut y = vec![ZERO; n];
    let mut prev_est = f64::INFINITY;
    let mut prev_delta = f64::NAN;
    for it in 1..=MAX_ITERATIONS {
        y.copy_from_slice(&x);
        lu.solve(&mut y);
        let ny = norm(&y);
        if !ny.is_finite() {
            break;
        }
        let est = 1.0 / ny;
        if est == 0.0 {
            return TridiagSmin {
                value: 0.0,
                iterations: it,
                fell_back: false,
            };
        }
        lu.solve_adjoint(&mut y);
        let nz = norm(&y);
        if !nz.is_finite() || nz == 0.0 {
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / nz;
        }

        let delta = (prev_est - est) / est;
        if delta <= 4.0 * f64::EPSILON {
            // stagnated at rounding level
            return TridiagSmin {
                value: est.min(prev_est),
                iterations: it,
                fell_back: false,
            };
        }
        if prev_delta.is_finite() {
            let ratio = delta / prev_delta;
            // geometric tail bound on the remaining decrease
            if ratio < 1.0 && delta * ratio / (1.0 - ratio) < REL_TOL {
                return TridiagSmin {
                    value: est,
                    iterations: it,
                    fell_back: false,
                };
            }
        }
        prev_delta = delta;
        prev_est = est;
    }

    log::debug!("tridiagonal inverse iteration did not converge at order {n}; using dense SVD");
    TridiagSmin {
        value: smin_dense(&t.to_dense()),
        iterations: MAX_ITERATIONS,
        fell_back: true,
    }
}

fn norm(v: &[C64]) -> f64 {
    sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

/// Fixed pseudo-random unit vector (SplitMix64 stream, constant seed).
fn start_vector(n: usize) -> Vec<C64> {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next = || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut v: Vec<C64> = (0..n).map(|_| C64::new(1.0 + next(), next())).collect();
    let s = norm(&v);
    for z in &mut v {
        *z /= s;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_matrix() {
        let t = TridiagC::new(vec![ZERO; 4], vec![c(2.0, 0.0); 5], vec![ZERO; 4]).unwrap();
        assert!((smin_tridiag(&t) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn order_two_shifted_hopping_matches_dense() {
        // A_2 with b = (-1), shift λ = 1: [[-1, 1], [-1, -1]]
        let t = TridiagC::new(vec![c(-1.0, 0.0)], vec![c(-1.0, 0.0); 2], vec![c(1.0, 0.0)]).unwrap();
        let dense = smin_dense(&t.to_dense());
        assert!((smin_tridiag(&t) - dense).abs() <= 1e-12 * dense);
        // the matrix is √2 times an orthogonal matrix
        assert!((dense - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn singular_factor_gives_zero() {
        let t = TridiagC::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0); 2], vec![c(1.0, 0.0)]).unwrap();
        assert_eq!(smin_tridiag(&t), 0.0);
    }

    #[test]
    fn lu_solves_both_systems() {
        let t = TridiagC::new(
            vec![c(3.0, 1.0), c(0.1, 0.0), c(-2.0, 0.5)],
            vec![c(0.1, 0.0), c(1.0, -1.0), c(0.0, 0.2), c(4.0, 0.0)],
            vec![c(1.0, 0.0), c(-1.0, 2.0), c(0.5, 0.5)],
        )
        .unwrap();
        let lu = TridiagLu::new(&t);
        let x: Vec<C64> = (0..4).map(|k| c(k as f64 + 1.0, -(k as f64))).collect();
        let mut b = t.apply(&x);
        lu.solve(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).norm() < 1e-12);
        }
        let adj = t.to_dense().adjoint().as_tridiag().unwrap();
        let mut b = adj.apply(&x);
        lu.solve_adjoint(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    fn arb_tridiag() -> impl Strategy<Value = TridiagC> {
        (2usize..41).prop_flat_map(|n| {
            let entry = (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| c(a, b));
            (
                proptest::collection::vec(entry.clone(), n - 1),
                proptest::collection::vec(entry.clone(), n),
                proptest::collection::vec(entry, n - 1),
            )
                .prop_map(|(sub, diag, sup)| TridiagC::new(sub, diag, sup).unwrap())
        })
    }

    proptest! {
        #[test]
        fn agrees_with_dense(t in arb_tridiag()) {
            let dense = smin_dense(&t.to_dense());
            let fast = smin_tridiag(&t);
            prop_assert!((fast - dense).abs() <= 1e-8 * dense.max(1e-300) + 1e-14,
                "fast {} dense {}", fast, dense);
        }
    }
}
