//! The inclusion radius `ε_n`, the field `S_n(λ) = min_c s_min(A_n^c − λI)`,
//! membership in its sublevel sets, exclusion certificates and grid sweeps.
//!
//! `S_n` is 1-Lipschitz and invariant under `λ ↦ λ̄`, `λ ↦ −λ`, `λ ↦ iλ`.
//! Its sublevel set at `ε_n` contains the almost-sure spectrum `Σ`, so a
//! point with `S_n(λ) > ε_n` lies outside `Σ` together with a disc of radius
//! `S_n(λ) − ε_n` around it and around each of its symmetry images.

mod grid;

pub use grid::{
    base_budget, boundary_from_field, grid_sweep, raster, sample_field, sigma_eps_boundary, sweep_base_cell,
    symmetry_plan, BaseCellResult, BoundaryResult, Cell, CellClass, GridBox, GridRegion, GridSpec, Image, SweepPlan,
    DEFAULT_EVALUATION_CAP,
};

use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::float::{cos, sin};
use crate::linalg::{smin_dense, smin_tridiag, TridiagC};
use crate::model::{self, EnumCursor};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PseudoError {
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("order {0} is too large for 64-bit sign masks")]
    OrderTooLarge(usize),
    #[error("root bracket for eps_n failed at n = {n}: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { n: usize, f_lo: f64, f_hi: f64 },
    #[error("eps must be positive and finite, got {0}")]
    BadEps(f64),
    #[error("lambda must be finite")]
    NonFiniteLambda,
    #[error("invalid grid: {0}")]
    BadGrid(&'static str),
}

/// Maximum bisection steps for `θ_n`.
pub const EPS_MAX_ITERATIONS: usize = 200;
/// Absolute tolerance on `θ_n`.
pub const EPS_THETA_TOL: f64 = 1e-15;

/// `ε_n = 4 sin θ_n`, where `θ_n` is the root of `2cos((n+1)θ) = cos((n−1)θ)`
/// in `(π/(2(n+3)), π/(2(n+2))]`.
pub fn eps_n(n: usize) -> Result<f64, PseudoError> {
    theta_n(n).map(|t| 4.0 * sin(t))
}

pub fn theta_n(n: usize) -> Result<f64, PseudoError> {
    if n == 0 {
        return Err(PseudoError::ZeroOrder);
    }
    let nf = n as f64;
    let f = |t: f64| 2.0 * cos((nf + 1.0) * t) - cos((nf - 1.0) * t);
    let mut lo = PI / (2.0 * (nf + 3.0));
    let mut hi = PI / (2.0 * (nf + 2.0));
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo == 0.0 || f_lo.signum() == f_hi.signum() {
        // n = 1 has its root at the right end; rounding can leave f(hi) a few
        // ulps off zero with the same sign as f(lo)
        if f_hi.abs() < 1e-14 {
            return Ok(hi);
        }
        return Err(PseudoError::Bracket { n, f_lo, f_hi });
    }
    let s_lo = f_lo.signum();
    for _ in 0..EPS_MAX_ITERATIONS {
        if hi - lo <= EPS_THETA_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Orders at or above this use the tridiagonal inverse-iteration kernel.
pub const DEFAULT_TRIDIAG_CROSSOVER: usize = 12;
/// Values within this absolute distance count as ties; ties go to the smaller bitmask.
pub const TIE_TOL: f64 = 1e-13;
/// Default enumeration chunk (Gray indices per work unit).
pub const DEFAULT_CHUNK: u64 = 1 << 20;

/// `S_n(λ)` together with where it was attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SminResult {
    pub value: f64,
    /// Reversal-canonical bitmask of a minimizing `c` (bit `j−1` set iff `c_j = −1`).
    pub argmin_bitmask: u64,
    pub n: usize,
    pub lambda: C64,
    pub matrices_evaluated: u64,
    /// The enumeration stopped early at a value below the cutoff; `value` is
    /// then only an upper bound on `S_n(λ)`.
    pub cutoff_hit: bool,
}

/// Running `(min, argmin)` over part of the enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partial {
    pub value: f64,
    pub argmin: u64,
    pub evaluated: u64,
    pub cutoff_hit: bool,
}

impl Partial {
    pub const EMPTY: Partial = Partial {
        value: f64::INFINITY,
        argmin: u64::MAX,
        evaluated: 0,
        cutoff_hit: false,
    };

    /// Whether `(value, mask)` should replace the current best.
    #[inline]
    pub fn beats(value: f64, mask: u64, best: f64, best_mask: u64) -> bool {
        value < best - TIE_TOL || ((value - best).abs() <= TIE_TOL && mask < best_mask)
    }

    #[inline]
    fn offer(&mut self, value: f64, mask: u64) {
        if Partial::beats(value, mask, self.value, self.argmin) {
            self.value = value;
            self.argmin = mask;
        }
    }

    /// Folds `later` into `self`; callers fold chunks in index order.
    pub fn merge(&mut self, later: &Partial) {
        if later.evaluated > 0 {
            self.offer(later.value, later.argmin);
        }
        self.evaluated += later.evaluated;
        self.cutoff_hit |= later.cutoff_hit;
    }

    pub fn finish(self, n: usize, lambda: C64) -> SminResult {
        SminResult {
            value: self.value,
            argmin_bitmask: self.argmin,
            n,
            lambda,
            matrices_evaluated: self.evaluated,
            cutoff_hit: self.cutoff_hit,
        }
    }
}

/// Number of Gray indices enumerated for order `n` (`2^{n−1}`).
pub fn index_count(n: usize) -> u64 {
    1u64 << (n - 1)
}

pub fn check_order(n: usize) -> Result<(), PseudoError> {
    match n {
        0 => Err(PseudoError::ZeroOrder),
        n if n > 63 => Err(PseudoError::OrderTooLarge(n)),
        _ => Ok(()),
    }
}

/// Minimum of `s_min(A_n^c − λI)` over reversal-canonical `c` whose Gray index
/// lies in `start..end`. With a cutoff, returns as soon as a value below it is seen.
pub fn evaluate_range(n: usize, lambda: C64, start: u64, end: u64, cutoff: Option<f64>, crossover: usize) -> Partial {
    let mut acc = Partial::EMPTY;
    let mut cursor = EnumCursor::range(n - 1, start, end, true);
    let mut t = TridiagC {
        sub: alloc::vec![C64::new(1.0, 0.0); n - 1],
        diag: alloc::vec![-lambda; n],
        sup: alloc::vec![C64::new(1.0, 0.0); n - 1],
    };
    let mut current: Option<u64> = None;
    while let Some((mask, flip)) = cursor.next_mask() {
        match (current, flip) {
            (Some(_), Some(j)) => t.sub[j] = -t.sub[j],
            _ => model::assemble_mask_into(&mut t, mask, lambda),
        }
        current = Some(mask);
        let s = if n < crossover { smin_dense(&t.to_dense()) } else { smin_tridiag(&t) };
        acc.evaluated += 1;
        acc.offer(s, mask);
        if let Some(cut) = cutoff {
            if s < cut {
                acc.cutoff_hit = true;
                break;
            }
        }
    }
    acc
}

/// Serial `S_n(λ)`, folding fixed chunks in index order. Gives the same value
/// and argmin as any parallel driver using the same chunk size.
pub fn s_n_serial(lambda: C64, n: usize, cutoff: Option<f64>) -> Result<SminResult, PseudoError> {
    s_n_chunked(lambda, n, cutoff, DEFAULT_CHUNK, DEFAULT_TRIDIAG_CROSSOVER)
}

pub fn s_n_chunked(
    lambda: C64,
    n: usize,
    cutoff: Option<f64>,
    chunk: u64,
    crossover: usize,
) -> Result<SminResult, PseudoError> {
    check_order(n)?;
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(PseudoError::NonFiniteLambda);
    }
    let total = index_count(n);
    let chunk = chunk.max(1);
    let mut acc = Partial::EMPTY;
    let mut start = 0;
    while start < total {
        let end = total.min(start.saturating_add(chunk));
        let part = evaluate_range(n, lambda, start, end, cutoff, crossover);
        acc.merge(&part);
        if part.cutoff_hit {
            break;
        }
        start = end;
    }
    Ok(acc.finish(n, lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipResult {
    pub verdict: Membership,
    /// `|S − η|` for the value found (an upper bound on `S` when `In` by cutoff).
    pub margin: f64,
    pub smin: SminResult,
}

/// Classifies an already computed `S_n` value against `η` (strict sublevel set).
pub fn classify_membership(smin: SminResult, eta: f64) -> MembershipResult {
    let verdict = if smin.value < eta { Membership::In } else { Membership::Out };
    MembershipResult {
        verdict,
        margin: (smin.value - eta).abs(),
        smin,
    }
}

/// Serial membership of `λ` in `{S_n < η}`, short-circuiting on the first witness.
pub fn membership(lambda: C64, n: usize, eta: f64) -> Result<MembershipResult, PseudoError> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(PseudoError::BadEps(eta));
    }
    Ok(classify_membership(s_n_serial(lambda, n, Some(eta))?, eta))
}

/// The images of `λ` under the symmetry group of `S_n` (generated by
/// conjugation and rotation by `i`), without duplicates.
pub fn symmetry_images(lambda: C64) -> Vec<C64> {
    let i = C64::new(0.0, 1.0);
    let mut out: Vec<C64> = Vec::with_capacity(8);
    for base in [lambda, lambda.conj()] {
        let mut z = base;
        for _ in 0..4 {
            if !out.iter().any(|w| (w - z).norm() <= 1e-15 * (1.0 + z.norm())) {
                out.push(z);
            }
            z *= i;
        }
    }
    out
}

/// Relative padding subtracted from certified radii to absorb kernel error.
pub const CERT_SAFETY_REL: f64 = 1e-9;

/// A proof (up to the padding) that discs around `centers` miss `Σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionCertificate {
    pub lambda: C64,
    pub n: usize,
    pub s_value: f64,
    pub eps_n: f64,
    /// `S_n(λ) − ε_n`.
    pub eta: f64,
    /// Symmetry images of `λ`.
    pub centers: Vec<C64>,
    /// `η − 1e-9·(1 + |λ|)`.
    pub radius: f64,
    pub argmin_bitmask: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertifyOutcome {
    Certified(ExclusionCertificate),
    /// `S_n(λ)` did not exceed `ε_n` by the padding; `deficit = ε_n − S_n(λ)`.
    Failed {
        lambda: C64,
        n: usize,
        s_value: f64,
        eps_n: f64,
        deficit: f64,
    },
}

impl CertifyOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, CertifyOutcome::Certified(_))
    }
}

/// Builds the certificate (or failure report) from a full, cutoff-free `S_n(λ)`.
pub fn certify_from(smin: &SminResult) -> Result<CertifyOutcome, PseudoError> {
    assert!(!smin.cutoff_hit, "certificates need the exact minimum");
    let eps = eps_n(smin.n)?;
    let eta = smin.value - eps;
    let radius = eta - CERT_SAFETY_REL * (1.0 + smin.lambda.norm());
    if radius > 0.0 {
        Ok(CertifyOutcome::Certified(ExclusionCertificate {
            lambda: smin.lambda,
            n: smin.n,
            s_value: smin.value,
            eps_n: eps,
            eta,
            centers: symmetry_images(smin.lambda),
            radius,
            argmin_bitmask: smin.argmin_bitmask,
        }))
    } else {
        Ok(CertifyOutcome::Failed {
            lambda: smin.lambda,
            n: smin.n,
            s_value: smin.value,
            eps_n: eps,
            deficit: -eta,
        })
    }
}

/// Serial certification of `λ` at order `n`.
pub fn certify_exclusion(lambda: C64, n: usize) -> Result<CertifyOutcome, PseudoError> {
    certify_from(&s_n_serial(lambda, n, None)?)
}
