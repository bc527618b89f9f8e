//! Spectral kernels for the random hopping sign model: finite tridiagonal
//! matrices with zero diagonal, unit super-diagonal and `±1` sub-diagonal,
//! together with their periodized (Floquet–Bloch) counterparts.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats, checkpointing and thread pools live
//! in the `hopping` companion crate.
//!
//! Modules:
//! - [`linalg`]: dense and tridiagonal complex eigenvalue / singular value kernels.
//! - [`model`]: sign sequences, matrix assembly, Gray-code enumeration.
//! - [`spectra`]: eigenvalue unions `σ_n`, `π_n`, closed-form oracle sets, set distances.
//! - [`pseudospectra`]: the inclusion radius `ε_n`, the minimum smallest singular
//!   value `S_n(λ)`, exclusion certificates and Lipschitz-pruned grid sweeps.
//! - [`numrange`]: numerical range boundaries via support functions.
//! - [`contour`]: marching-squares level curves.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod contour;
pub mod linalg;
pub mod model;
pub mod numrange;
pub mod pseudospectra;
pub mod spectra;

pub use num_complex::Complex64 as C64;

/// Unit roundoff for `f64`.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON * 0.5;

pub(crate) mod float {
    //! `f64` helpers that do not depend on `std`.

    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }

    #[inline]
    pub fn hypot(x: f64, y: f64) -> f64 {
        libm::hypot(x, y)
    }

    #[inline]
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }

    #[inline]
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }

    #[inline]
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }

    #[inline]
    pub fn round(x: f64) -> f64 {
        libm::round(x)
    }

    #[inline]
    pub fn cis(theta: f64) -> crate::C64 {
        crate::C64::new(cos(theta), sin(theta))
    }

    /// `|re| + |im|`, the cheap modulus used in deflation tests.
    #[inline]
    pub fn cabs1(z: crate::C64) -> f64 {
        z.re.abs() + z.im.abs()
    }
}
