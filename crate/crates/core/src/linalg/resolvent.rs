//! Resolvent norms `‖(M − λI)⁻¹‖_p` for `p ∈ {1, 2, ∞}`.

use alloc::vec::Vec;

use super::{singular_values, CMatrix, LinalgError};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    One,
    Two,
    Inf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolventStatus {
    Regular,
    /// `s_min(M − λI) < 1e-12·(1 + ‖M‖₂)`: λ is treated as an eigenvalue.
    Singular,
    /// The explicit inverse has a 1-norm condition estimate above `1/u`.
    NumericallySingular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventNorm {
    /// `+∞` unless `status` is `Regular`.
    pub value: f64,
    pub status: ResolventStatus,
}

/// Singularity threshold relative to `1 + ‖M‖₂`.
pub const SINGULAR_REL: f64 = 1e-12;

pub fn resolvent_norm(m: &CMatrix, lambda: C64, p: NormKind) -> Result<ResolventNorm, LinalgError> {
    m.check_finite()?;
    let shifted = m.shifted(lambda);
    let norm2 = singular_values(m)[0];
    let smin = *singular_values(&shifted).last().unwrap_or(&0.0);
    if smin < SINGULAR_REL * (1.0 + norm2) {
        return Ok(ResolventNorm {
            value: f64::INFINITY,
            status: ResolventStatus::Singular,
        });
    }
    if p == NormKind::Two {
        return Ok(ResolventNorm {
            value: 1.0 / smin,
            status: ResolventStatus::Regular,
        });
    }
    let inv = match invert(&shifted) {
        Some(inv) => inv,
        None => {
            return Ok(ResolventNorm {
                value: f64::INFINITY,
                status: ResolventStatus::NumericallySingular,
            })
        }
    };
    let cond = shifted.norm_one() * inv.norm_one();
    if !(cond.is_finite() && cond <= 1.0 / crate::UNIT_ROUNDOFF) {
        return Ok(ResolventNorm {
            value: f64::INFINITY,
            status: ResolventStatus::NumericallySingular,
        });
    }
    let value = match p {
        NormKind::One => inv.norm_one(),
        _ => inv.norm_inf(),
    };
    Ok(ResolventNorm {
        value,
        status: ResolventStatus::Regular,
    })
}

/// Gauss–Jordan inversion with partial pivoting; `None` on an exact zero pivot.
fn invert(m: &CMatrix) -> Option<CMatrix> {
    let n = m.order();
    let mut a: Vec<C64> = m.as_slice().to_vec();
    let mut inv = CMatrix::identity(n);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| {
            a[i * n + k]
                .norm()
                .partial_cmp(&a[j * n + k].norm())
                .unwrap_or(core::cmp::Ordering::Equal)
        })?;
        let piv = a[p * n + k];
        if piv == C64::new(0.0, 0.0) {
            return None;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
                let t = inv[(k, j)];
                inv[(k, j)] = inv[(p, j)];
                inv[(p, j)] = t;
            }
        }
        let r = C64::new(1.0, 0.0) / piv;
        for j in 0..n {
            a[k * n + j] *= r;
            inv[(k, j)] *= r;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a[i * n + k];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let t = a[k * n + j];
                a[i * n + j] -= f * t;
                let t = inv[(k, j)];
                inv[(i, j)] -= f * t;
            }
        }
    }
    Some(inv)
}
