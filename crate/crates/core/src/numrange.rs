//! Numerical range boundaries by the rotation method.
//!
//! `h(θ) = λ_max((e^{−iθ}M + e^{iθ}M*)/2)` is the support function of `W(M)`
//! in direction `e^{iθ}`. Intersecting consecutive support lines gives a
//! convex polygon circumscribing `W(M)`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use thiserror::Error;

use crate::float::{cis, cos, sin};
use crate::linalg::{hermitian_eigenvalues, hermitian_tridiag_max_eigenvalue, CMatrix, TridiagC};
use crate::C64;

pub const DEFAULT_ANGLE_COUNT: usize = 720;
/// Polygons with smaller area are reported as segments or points.
pub const DEGENERATE_AREA: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumRangeError {
    #[error("angle_count must be at least 8, got {0}")]
    TooFewAngles(usize),
    #[error("matrix must have order at least 1")]
    Empty,
}

/// Support function of `W(M)` at angle `theta`.
pub fn support_function(m: &CMatrix, theta: f64) -> f64 {
    match m.as_tridiag() {
        Some(t) => support_function_tridiag(&t, theta),
        None => {
            let w = cis(-theta);
            let h = CMatrix::from_fn(m.order(), |i, j| (w * m[(i, j)] + (w * m[(j, i)]).conj()) * 0.5);
            *hermitian_eigenvalues(&h).last().expect("order ≥ 1")
        }
    }
}

/// Support function for a tridiagonal matrix; the Hermitian part is tridiagonal
/// too, so the largest eigenvalue comes from Sturm bisection in O(n) per step.
pub fn support_function_tridiag(t: &TridiagC, theta: f64) -> f64 {
    let w = cis(-theta);
    let diag: Vec<f64> = t.diag.iter().map(|d| (w * d).re).collect();
    let off_sq: Vec<f64> = t
        .sup
        .iter()
        .zip(&t.sub)
        .map(|(u, l)| ((w * u + (w * l).conj()) * 0.5).norm_sqr())
        .collect();
    hermitian_tridiag_max_eigenvalue(&diag, &off_sq)
}

/// Support function of the closed square `|x| + |y| ≤ 2`.
pub fn delta_support(theta: f64) -> f64 {
    2.0 * cos(theta).abs().max(sin(theta).abs())
}

/// Sampled support function and the circumscribed polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportCurve {
    /// `θ_k = 2πk/m`.
    pub angles: Vec<f64>,
    pub h: Vec<f64>,
    /// Intersection of the support lines at `θ_k` and `θ_{k+1}`.
    pub boundary: Vec<C64>,
    pub area: f64,
    /// The polygon has area below [`DEGENERATE_AREA`]: `W` is a segment or a point.
    pub degenerate: bool,
}

impl SupportCurve {
    pub fn from_support(angles: Vec<f64>, h: Vec<f64>) -> Self {
        let m = angles.len();
        let boundary: Vec<C64> = (0..m)
            .map(|k| {
                let (t1, t2) = (angles[k], angles[(k + 1) % m]);
                let (h1, h2) = (h[k], h[(k + 1) % m]);
                let det = sin(t2 - t1);
                C64::new(
                    (h1 * sin(t2) - h2 * sin(t1)) / det,
                    (h2 * cos(t1) - h1 * cos(t2)) / det,
                )
            })
            .collect();
        let area = 0.5
            * (0..m)
                .map(|k| {
                    let (a, b) = (boundary[k], boundary[(k + 1) % m]);
                    a.re * b.im - a.im * b.re
                })
                .sum::<f64>()
                .abs();
        SupportCurve {
            angles,
            h,
            boundary,
            area,
            degenerate: area < DEGENERATE_AREA,
        }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

fn uniform_angles(angle_count: usize) -> Result<Vec<f64>, NumRangeError> {
    if angle_count < 8 {
        return Err(NumRangeError::TooFewAngles(angle_count));
    }
    Ok((0..angle_count).map(|k| TAU * k as f64 / angle_count as f64).collect())
}

pub fn nr_boundary(m: &CMatrix, angle_count: usize) -> Result<SupportCurve, NumRangeError> {
    if m.order() == 0 {
        return Err(NumRangeError::Empty);
    }
    let angles = uniform_angles(angle_count)?;
    let h = match m.as_tridiag() {
        Some(t) => angles.iter().map(|&a| support_function_tridiag(&t, a)).collect(),
        None => angles.iter().map(|&a| support_function(m, a)).collect(),
    };
    Ok(SupportCurve::from_support(angles, h))
}

pub fn nr_boundary_tridiag(t: &TridiagC, angle_count: usize) -> Result<SupportCurve, NumRangeError> {
    let angles = uniform_angles(angle_count)?;
    let h = angles.iter().map(|&a| support_function_tridiag(t, a)).collect();
    Ok(SupportCurve::from_support(angles, h))
}

/// `max_θ (h_Δ(θ) − h(θ))` over the sampled angles.
pub fn delta_gap(curve: &SupportCurve) -> f64 {
    curve
        .angles
        .iter()
        .zip(&curve.h)
        .map(|(&a, &h)| delta_support(a) - h)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{assemble, sample_iid, HoppingSpec, SignSeq};
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn hopping(b: &str) -> TridiagC {
        assemble(&HoppingSpec::single(b.parse::<SignSeq>().unwrap()), C64::new(0.0, 0.0))
    }

    #[test]
    fn order_one_is_a_point() {
        let t = TridiagC::new(Vec::new(), alloc::vec![C64::new(0.0, 0.0)], Vec::new()).unwrap();
        assert_eq!(support_function_tridiag(&t, 1.0), 0.0);
        let curve = nr_boundary_tridiag(&t, 16).unwrap();
        assert!(curve.degenerate);
        assert!((delta_gap(&curve) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn support_examples() {
        assert!((support_function_tridiag(&hopping("+"), 0.0) - 1.0).abs() < 1e-14);
        for n in [3usize, 7, 20] {
            let b: alloc::string::String = "+".repeat(n - 1);
            let want = 2.0 * cos(PI / (n as f64 + 1.0));
            assert!((support_function_tridiag(&hopping(&b), 0.0) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_and_tridiagonal_paths_agree() {
        let t = hopping("+--+-++");
        let dense = t.to_dense();
        // Jacobi on the explicit Hermitian part versus Sturm bisection
        for k in 0..24 {
            let theta = TAU * k as f64 / 24.0;
            let w = cis(-theta);
            let h = CMatrix::from_fn(dense.order(), |i, j| (w * dense[(i, j)] + (w * dense[(j, i)]).conj()) * 0.5);
            let jac = *hermitian_eigenvalues(&h).last().unwrap();
            assert!((jac - support_function_tridiag(&t, theta)).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_case_is_a_real_segment() {
        let curve = nr_boundary_tridiag(&hopping("++"), 720).unwrap();
        assert!(curve.degenerate);
        let r2 = 2f64.sqrt();
        assert!((curve.h[0] - r2).abs() < 1e-12);
        assert!((curve.h[360] - r2).abs() < 1e-12);
        for b in &curve.boundary {
            assert!(b.im.abs() < 1e-9 && b.re.abs() <= r2 + 1e-9, "{b}");
        }
        // gap: 2 − √2 at θ = 0 and 2 at θ = π/2
        assert!((curve.h[180]).abs() < 1e-12);
        assert!((delta_gap(&curve) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn skew_case_is_an_imaginary_segment() {
        let curve = nr_boundary_tridiag(&hopping("-"), 64).unwrap();
        assert!(curve.degenerate);
        for b in &curve.boundary {
            assert!(b.re.abs() < 1e-9 && b.im.abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn mixed_signs_give_a_convex_polygon_inside_the_square() {
        let curve = nr_boundary(&hopping("+-").to_dense(), 360).unwrap();
        assert!(!curve.degenerate);
        let m = curve.len();
        for k in 0..m {
            let (a, b, c) = (curve.boundary[k], curve.boundary[(k + 1) % m], curve.boundary[(k + 2) % m]);
            let cross = (b - a).re * (c - b).im - (b - a).im * (c - b).re;
            assert!(cross >= -1e-12);
            assert!(a.re.abs() + a.im.abs() < 2.0);
        }
    }

    #[test]
    fn random_long_sequence_stays_inside() {
        let b = sample_iid(99, 0.5, 7).unwrap();
        let t = assemble(&HoppingSpec::single(b), C64::new(0.0, 0.0));
        let curve = nr_boundary_tridiag(&t, 720).unwrap();
        for z in &curve.boundary {
            assert!(z.re.abs() + z.im.abs() < 2.0);
        }
        assert!(delta_gap(&curve) > 0.0);
    }

    #[test]
    fn rejects_too_few_angles() {
        assert_eq!(nr_boundary_tridiag(&hopping("+"), 7), Err(NumRangeError::TooFewAngles(7)));
    }

    proptest! {
        #[test]
        fn support_below_square_and_monotone_in_prefix(seed in any::<u64>(), n in 2usize..60, extra in 1usize..40) {
            let long = sample_iid(n + extra - 1, 0.5, seed).unwrap();
            let short = long.prefix(n - 1);
            let t_long = assemble(&HoppingSpec::single(long), C64::new(0.0, 0.0));
            let t_short = assemble(&HoppingSpec::single(short), C64::new(0.0, 0.0));
            for k in 0..32 {
                let theta = TAU * k as f64 / 32.0 + 0.01;
                let hs = support_function_tridiag(&t_short, theta);
                let hl = support_function_tridiag(&t_long, theta);
                prop_assert!(hs <= delta_support(theta) + 1e-9);
                prop_assert!(hs <= hl + 1e-9);
            }
        }
    }
}
