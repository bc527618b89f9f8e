//! Dense and tridiagonal complex linear algebra.
//!
//! All kernels work in double precision. Matrices are small (order up to a
//! few dozen for the brute-force paths, a few thousand for the tridiagonal
//! ones), so the dense routines favour simplicity and accuracy over blocking.

mod eig;
mod hermitian;
mod resolvent;
mod svd;
mod tridiag;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use thiserror::Error;

use crate::C64;

pub use eig::{eig_dense, MAX_SWEEPS_PER_ORDER};
pub use hermitian::{hermitian_eigenvalues, hermitian_tridiag_max_eigenvalue};
pub use resolvent::{resolvent_norm, NormKind, ResolventNorm, ResolventStatus};
pub use svd::{singular_values, smin_dense};
pub use tridiag::{smin_tridiag, smin_tridiag_detailed, TridiagLu, TridiagSmin};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix of order 0")]
    Empty,
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("eigenvalue iteration did not converge after {sweeps} sweeps on a matrix of order {}", .matrix.order())]
    NoConvergence { sweeps: usize, matrix: CMatrix },
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMatrix { n, data }
    }

    /// Builds a matrix from row-major entries; the length must be a perfect square.
    pub fn from_row_major(data: Vec<C64>) -> Result<Self, LinalgError> {
        let n = isqrt(data.len());
        if n * n != data.len() {
            return Err(LinalgError::Shape {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(CMatrix { n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(LinalgError::Shape {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Ok(CMatrix { n, data })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// `self − shift·I`.
    pub fn shifted(&self, shift: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] -= shift;
        }
        m
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n, "order mismatch");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Fails with the position of the first NaN/infinite entry, if any.
    pub fn check_finite(&self) -> Result<(), LinalgError> {
        if self.n == 0 {
            return Err(LinalgError::Empty);
        }
        match self
            .data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            Some(k) => Err(LinalgError::NonFinite {
                row: k / self.n,
                col: k % self.n,
            }),
            None => Ok(()),
        }
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        crate::float::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Returns `Some` when every entry off the three central diagonals is zero.
    pub fn as_tridiag(&self) -> Option<TridiagC> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if (i as isize - j as isize).abs() > 1 && self[(i, j)] != C64::new(0.0, 0.0) {
                    return None;
                }
            }
        }
        Some(TridiagC {
            sub: (0..n.saturating_sub(1)).map(|i| self[(i + 1, i)]).collect(),
            diag: (0..n).map(|i| self[(i, i)]).collect(),
            sup: (0..n.saturating_sub(1)).map(|i| self[(i, i + 1)]).collect(),
        })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Complex tridiagonal matrix: `sub[i]` sits at `(i+1, i)`, `sup[i]` at `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagC {
    pub sub: Vec<C64>,
    pub diag: Vec<C64>,
    pub sup: Vec<C64>,
}

impl TridiagC {
    pub fn new(sub: Vec<C64>, diag: Vec<C64>, sup: Vec<C64>) -> Result<Self, LinalgError> {
        let n = diag.len();
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        for len in [sub.len(), sup.len()] {
            if len != n - 1 {
                return Err(LinalgError::Shape {
                    expected: n - 1,
                    got: len,
                });
            }
        }
        let t = TridiagC { sub, diag, sup };
        t.check_finite()?;
        Ok(t)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn check_finite(&self) -> Result<(), LinalgError> {
        let ok = |z: &C64| z.re.is_finite() && z.im.is_finite();
        if let Some(i) = self.diag.iter().position(|z| !ok(z)) {
            return Err(LinalgError::NonFinite { row: i, col: i });
        }
        if let Some(i) = self.sub.iter().position(|z| !ok(z)) {
            return Err(LinalgError::NonFinite { row: i + 1, col: i });
        }
        if let Some(i) = self.sup.iter().position(|z| !ok(z)) {
            return Err(LinalgError::NonFinite { row: i, col: i + 1 });
        }
        Ok(())
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.order();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for i in 0..n.saturating_sub(1) {
            m[(i + 1, i)] = self.sub[i];
            m[(i, i + 1)] = self.sup[i];
        }
        m
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.order();
        let mut y: Vec<C64> = (0..n).map(|i| self.diag[i] * x[i]).collect();
        for i in 0..n.saturating_sub(1) {
            y[i] += self.sup[i] * x[i + 1];
            y[i + 1] += self.sub[i] * x[i];
        }
        y
    }
}

fn isqrt(k: usize) -> usize {
    let mut r = crate::float::sqrt(k as f64) as usize;
    while r * r > k {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= k {
        r += 1;
    }
    r
}
