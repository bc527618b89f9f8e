//! Eigenvalue unions of finite and periodized hopping matrices, closed-form
//! comparison sets, and Hausdorff-type distances between point sets.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::float::{cis, cos, floor, hypot, sqrt};
use crate::linalg::{eig_dense, CMatrix, LinalgError};
use crate::model::{self, EnumCursor};
use crate::C64;

/// Largest order accepted by [`sigma_n`] unless a different cap is passed.
pub const DEFAULT_SIGMA_CAP: usize = 16;
/// Largest point count accepted by [`pi_n`] unless a different cap is passed.
pub const DEFAULT_PI_MAX_POINTS: u64 = 1 << 26;
/// Slack on the `|Re z| + |Im z| ≤ 2` bound for computed eigenvalues.
pub const DELTA_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("order {n} exceeds the cap {cap}; the cloud would hold {required_points} points")]
    CapExceeded {
        n: usize,
        cap: usize,
        required_points: u64,
    },
    #[error("{required_points} points exceed the point budget {max_points}")]
    TooManyPoints { required_points: u64, max_points: u64 },
    #[error("alpha_count must be at least 4, got {0}")]
    AlphaCount(usize),
    #[error("empty point cloud")]
    EmptyCloud,
    #[error("unknown oracle set {0:?}")]
    UnknownSet(alloc::string::String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CloudSource {
    Sigma,
    Pi,
    Chebyshev,
    Custom,
}

impl CloudSource {
    pub fn tag(self) -> &'static str {
        match self {
            CloudSource::Sigma => "sigma",
            CloudSource::Pi => "pi",
            CloudSource::Chebyshev => "chebyshev",
            CloudSource::Custom => "custom",
        }
    }
}

/// Finite multiset of complex points with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<C64>,
    pub source: CloudSource,
    pub n: usize,
    /// Number of Floquet phases sampled (for `Pi` clouds).
    pub alpha_count: Option<usize>,
}

impl PointCloud {
    pub fn custom(points: Vec<C64>) -> Self {
        PointCloud {
            points,
            source: CloudSource::Custom,
            n: 0,
            alpha_count: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sorts by `(Re, Im)` under the IEEE total order.
    pub fn sort(&mut self) {
        sort_points(&mut self.points);
    }

    /// Largest `|Re z| + |Im z|` over the cloud.
    pub fn max_l1(&self) -> f64 {
        self.points
            .iter()
            .map(|z| z.re.abs() + z.im.abs())
            .fold(0.0, f64::max)
    }
}

pub fn sort_points(points: &mut [C64]) {
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Eigenvalues of `A_n^c` for every reversal representative `c` whose Gray
/// index lies in `start..end`. Disjoint ranges partition the work of [`sigma_n`].
pub fn sigma_n_range(n: usize, start: u64, end: u64) -> Result<Vec<C64>, SpectraError> {
    if n == 0 {
        return Err(SpectraError::ZeroOrder);
    }
    let mut cursor = EnumCursor::range(n - 1, start, end, true);
    let mut t = model::assemble(&model::HoppingSpec::from_mask(n, 0).expect("n ≥ 1"), C64::new(0.0, 0.0));
    let mut out = Vec::new();
    while let Some((mask, _)) = cursor.next_mask() {
        model::assemble_mask_into(&mut t, mask, C64::new(0.0, 0.0));
        out.extend(eig_dense(&t.to_dense())?);
    }
    Ok(out)
}

/// Number of points [`sigma_n`] produces.
pub fn sigma_point_count(n: usize) -> u64 {
    model::reversal_class_count(n - 1) * n as u64
}

/// `σ_n`: all eigenvalues of the `2^{n-1}` matrices `A_n^c`, collected over
/// reversal representatives (a reversal is a permutation similarity up to
/// transposition, so it adds no new eigenvalues). Sorted by `(Re, Im)`.
pub fn sigma_n(n: usize) -> Result<PointCloud, SpectraError> {
    sigma_n_with_cap(n, DEFAULT_SIGMA_CAP)
}

pub fn sigma_n_with_cap(n: usize, cap: usize) -> Result<PointCloud, SpectraError> {
    if n == 0 {
        return Err(SpectraError::ZeroOrder);
    }
    if n > cap || n > 63 {
        return Err(SpectraError::CapExceeded {
            n,
            cap,
            required_points: if n <= 63 { sigma_point_count(n) } else { u64::MAX },
        });
    }
    let mut points = sigma_n_range(n, 0, 1u64 << (n - 1))?;
    sort_points(&mut points);
    Ok(PointCloud {
        points,
        source: CloudSource::Sigma,
        n,
        alpha_count: None,
    })
}

/// Default number of Floquet phases for period `n`.
pub fn default_alpha_count(n: usize) -> usize {
    256.max(32 * n)
}

/// Crude bound on `|dλ/dθ|` along the analytic arcs of a periodic spectrum.
pub const ARC_SPEED_BOUND: f64 = 4.0;

/// Heuristic distance within which every point of a periodic spectrum is
/// expected to lie from a cloud sampled with `alpha_count` phases, away from
/// branch points: `2π·L̂ / alpha_count`.
pub fn alpha_resolution(alpha_count: usize) -> f64 {
    TAU * ARC_SPEED_BOUND / alpha_count as f64
}

/// Like [`alpha_resolution`] but valid near square-root branch points, where
/// an arc moves like the square root of the phase: `sqrt(2π·L̂ / alpha_count)`.
pub fn branch_resolution(alpha_count: usize) -> f64 {
    sqrt(alpha_resolution(alpha_count))
}

/// Eigenvalues of the periodized matrix for period `mask` (bitmask of `b`,
/// `c` all ones) at the phases `e^{2πik/K}`, `k = 0..K`. Only `k ≤ K/2` is
/// solved; the rest follow by conjugation since the matrix at `ᾱ` is the
/// complex conjugate of the one at `α`.
pub fn periodic_points_into(n: usize, mask: u64, alpha_count: usize, out: &mut Vec<C64>) -> Result<(), SpectraError> {
    let mut m = CMatrix::zeros(n);
    for k in 0..=alpha_count / 2 {
        let alpha = cis(TAU * k as f64 / alpha_count as f64);
        model::assemble_periodized_mask_into(&mut m, mask, alpha);
        let ev = eig_dense(&m)?;
        let mirrored = k != 0 && 2 * k != alpha_count;
        out.extend_from_slice(&ev);
        if mirrored {
            out.extend(ev.iter().map(|z| z.conj()));
        }
    }
    Ok(())
}

/// Point count of [`pi_n`].
pub fn pi_point_count(n: usize, alpha_count: usize) -> u64 {
    model::necklace_representatives(n).len() as u64 * alpha_count as u64 * n as u64
}

/// `π_n` sampled at `alpha_count` uniform Floquet phases: the union over all
/// `n`-periodic sign sequences of the periodized spectra. Periods that are
/// cyclic shifts of each other have identical Floquet spectra at every phase,
/// so one period per shift class is solved.
pub fn pi_n(n: usize, alpha_count: usize) -> Result<PointCloud, SpectraError> {
    pi_n_with_budget(n, alpha_count, DEFAULT_PI_MAX_POINTS)
}

pub fn pi_n_with_budget(n: usize, alpha_count: usize, max_points: u64) -> Result<PointCloud, SpectraError> {
    check_pi_args(n, alpha_count)?;
    let required = pi_point_count(n, alpha_count);
    if required > max_points {
        return Err(SpectraError::TooManyPoints {
            required_points: required,
            max_points,
        });
    }
    let mut points = Vec::with_capacity(required as usize);
    for mask in model::necklace_representatives(n) {
        periodic_points_into(n, mask, alpha_count, &mut points)?;
    }
    sort_points(&mut points);
    Ok(PointCloud {
        points,
        source: CloudSource::Pi,
        n,
        alpha_count: Some(alpha_count),
    })
}

pub fn check_pi_args(n: usize, alpha_count: usize) -> Result<(), SpectraError> {
    if n == 0 {
        return Err(SpectraError::ZeroOrder);
    }
    if n > 30 {
        return Err(SpectraError::CapExceeded {
            n,
            cap: 30,
            required_points: u64::MAX,
        });
    }
    if alpha_count < 4 {
        return Err(SpectraError::AlphaCount(alpha_count));
    }
    Ok(())
}

/// `{2cos(jπ/(n+1)) : j = 1..n}`, the spectrum of the all-ones `A_n`.
pub fn chebyshev_cloud(n: usize) -> PointCloud {
    let mut points: Vec<C64> = (1..=n)
        .map(|j| C64::new(2.0 * cos(j as f64 * PI / (n as f64 + 1.0)), 0.0))
        .collect();
    sort_points(&mut points);
    PointCloud {
        points,
        source: CloudSource::Chebyshev,
        n,
        alpha_count: None,
    }
}

/// Closed-form sets used as oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleSet {
    /// `[−2, 2] ∪ i[−2, 2]`.
    Pi1,
    /// `{x ± ix : −1 ≤ x ≤ 1}`.
    Tau2,
    /// `i[−1, 1] ∪ {x + iy : |y| ≤ 1/2, x² = 1 + 3y²}`.
    Tau3,
    /// `iτ_3`.
    ITau3,
    /// `π_1 ∪ τ_2`.
    Pi2,
    /// `π_1 ∪ τ_3 ∪ iτ_3`.
    Pi3,
    /// Closed unit disc.
    Disc,
    /// Closed square `|x| + |y| ≤ 2`.
    DeltaSquare,
}

impl OracleSet {
    pub const ALL: [OracleSet; 8] = [
        OracleSet::Pi1,
        OracleSet::Tau2,
        OracleSet::Tau3,
        OracleSet::ITau3,
        OracleSet::Pi2,
        OracleSet::Pi3,
        OracleSet::Disc,
        OracleSet::DeltaSquare,
    ];

    pub fn id(self) -> &'static str {
        match self {
            OracleSet::Pi1 => "pi1",
            OracleSet::Tau2 => "tau2",
            OracleSet::Tau3 => "tau3",
            OracleSet::ITau3 => "itau3",
            OracleSet::Pi2 => "pi2",
            OracleSet::Pi3 => "pi3",
            OracleSet::Disc => "disc",
            OracleSet::DeltaSquare => "delta_square",
        }
    }

    /// Points spread along the set's boundary curves (its 1-D pieces), for
    /// coverage checks. Two-dimensional sets sample their boundary.
    pub fn sample(self, per_piece: usize) -> Vec<C64> {
        let lin = |k: usize| -1.0 + 2.0 * k as f64 / (per_piece - 1) as f64;
        let i = C64::new(0.0, 1.0);
        let mut out = Vec::new();
        match self {
            OracleSet::Pi1 => {
                for k in 0..per_piece {
                    out.push(C64::new(2.0 * lin(k), 0.0));
                    out.push(C64::new(0.0, 2.0 * lin(k)));
                }
            }
            OracleSet::Tau2 => {
                for k in 0..per_piece {
                    let x = lin(k);
                    out.push(C64::new(x, x));
                    out.push(C64::new(x, -x));
                }
            }
            OracleSet::Tau3 => {
                for k in 0..per_piece {
                    out.push(C64::new(0.0, lin(k)));
                    let y = 0.5 * lin(k);
                    let x = sqrt(1.0 + 3.0 * y * y);
                    out.push(C64::new(x, y));
                    out.push(C64::new(-x, y));
                }
            }
            OracleSet::ITau3 => {
                out = OracleSet::Tau3.sample(per_piece).into_iter().map(|z| z * i).collect();
            }
            OracleSet::Pi2 => {
                out = OracleSet::Pi1.sample(per_piece);
                out.extend(OracleSet::Tau2.sample(per_piece));
            }
            OracleSet::Pi3 => {
                out = OracleSet::Pi1.sample(per_piece);
                out.extend(OracleSet::Tau3.sample(per_piece));
                out.extend(OracleSet::ITau3.sample(per_piece));
            }
            OracleSet::Disc => {
                for k in 0..per_piece {
                    out.push(cis(TAU * k as f64 / per_piece as f64));
                }
            }
            OracleSet::DeltaSquare => {
                let corners = [C64::new(2.0, 0.0), C64::new(0.0, 2.0), C64::new(-2.0, 0.0), C64::new(0.0, -2.0)];
                for e in 0..4 {
                    let (a, b) = (corners[e], corners[(e + 1) % 4]);
                    for k in 0..per_piece {
                        let t = k as f64 / per_piece as f64;
                        out.push(a + (b - a) * t);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for OracleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for OracleSet {
    type Err = SpectraError;

    fn from_str(s: &str) -> Result<Self, SpectraError> {
        OracleSet::ALL
            .into_iter()
            .find(|set| set.id() == s)
            .ok_or_else(|| SpectraError::UnknownSet(s.into()))
    }
}

/// Euclidean distance from `z` to the closed segment `[a, b]`.
pub fn segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a).re * d.re + (z - a).im * d.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Distance from `z` to the hyperbola arc `{(s·sqrt(1+3y²), y) : |y| ≤ 1/2}`, `s = ±1`.
fn hyperbola_arc_distance(z: C64, s: f64) -> f64 {
    let dist2 = |y: f64| {
        let x = s * sqrt(1.0 + 3.0 * y * y);
        (z.re - x) * (z.re - x) + (z.im - y) * (z.im - y)
    };
    // coarse scan, then golden-section refinement around each local minimum
    const SAMPLES: usize = 64;
    let ys: Vec<f64> = (0..=SAMPLES).map(|k| -0.5 + k as f64 / SAMPLES as f64).collect();
    let vals: Vec<f64> = ys.iter().map(|&y| dist2(y)).collect();
    let mut best = vals.iter().copied().fold(f64::INFINITY, f64::min);
    for k in 0..=SAMPLES {
        let left = if k == 0 { f64::INFINITY } else { vals[k - 1] };
        let right = if k == SAMPLES { f64::INFINITY } else { vals[k + 1] };
        if vals[k] <= left && vals[k] <= right {
            let lo = ys[k.saturating_sub(1)];
            let hi = ys[(k + 1).min(SAMPLES)];
            best = best.min(golden_min(&dist2, lo, hi));
        }
    }
    sqrt(best)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..100 {
        if b - a < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd).min(f(a)).min(f(b))
}

/// Exact Euclidean distance from `z` to the named closed set.
pub fn oracle_membership(set: OracleSet, z: C64) -> f64 {
    let c = C64::new;
    match set {
        OracleSet::Pi1 => segment_distance(z, c(-2.0, 0.0), c(2.0, 0.0))
            .min(segment_distance(z, c(0.0, -2.0), c(0.0, 2.0))),
        OracleSet::Tau2 => segment_distance(z, c(-1.0, -1.0), c(1.0, 1.0))
            .min(segment_distance(z, c(-1.0, 1.0), c(1.0, -1.0))),
        OracleSet::Tau3 => segment_distance(z, c(0.0, -1.0), c(0.0, 1.0))
            .min(hyperbola_arc_distance(z, 1.0))
            .min(hyperbola_arc_distance(z, -1.0)),
        // z ∈ iτ_3 ⇔ −iz ∈ τ_3, and multiplication by i is an isometry
        OracleSet::ITau3 => oracle_membership(OracleSet::Tau3, z * c(0.0, -1.0)),
        OracleSet::Pi2 => oracle_membership(OracleSet::Pi1, z).min(oracle_membership(OracleSet::Tau2, z)),
        OracleSet::Pi3 => oracle_membership(OracleSet::Pi1, z)
            .min(oracle_membership(OracleSet::Tau3, z))
            .min(oracle_membership(OracleSet::ITau3, z)),
        OracleSet::Disc => (z.norm() - 1.0).max(0.0),
        OracleSet::DeltaSquare => {
            // by symmetry, fold into the first quadrant: the set is the
            // triangle (0,0), (2,0), (0,2)
            let x = z.re.abs();
            let y = z.im.abs();
            if x + y <= 2.0 {
                0.0
            } else if y > x + 2.0 {
                (c(x, y) - c(0.0, 2.0)).norm()
            } else if x > y + 2.0 {
                (c(x, y) - c(2.0, 0.0)).norm()
            } else {
                (x + y - 2.0) / core::f64::consts::SQRT_2
            }
        }
    }
}

/// Distances between point sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetDistanceReport {
    /// Symmetric Hausdorff distance (for containment checks, the one-sided value).
    pub hausdorff: f64,
    /// One-sided `sup_{z ∈ inner} dist(z, outer)`.
    pub max_violation: f64,
    /// Point attaining `max_violation`.
    pub witness: C64,
}

impl SetDistanceReport {
    pub fn within(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }
}

/// Uniform-grid bucket index for nearest-point queries on a planar point set.
#[derive(Debug, Clone)]
pub struct NearestIndex {
    points: Vec<C64>,
    origin: C64,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<usize>,
    order: Vec<u32>,
}

impl NearestIndex {
    pub fn new(points: &[C64]) -> Result<Self, SpectraError> {
        if points.is_empty() {
            return Err(SpectraError::EmptyCloud);
        }
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for z in points {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        let w = (x1 - x0).max(1e-12);
        let h = (y1 - y0).max(1e-12);
        // about two points per bucket
        let target = (points.len() as f64 / 2.0).max(1.0);
        let cell = sqrt(w * h / target).max(w.max(h) / 4096.0).max(1e-12);
        let nx = ((w / cell) as usize + 1).min(1 << 14);
        let ny = ((h / cell) as usize + 1).min(1 << 14);
        let cell = (w / nx as f64).max(h / ny as f64).max(1e-12);
        let nx = (w / cell) as usize + 1;
        let ny = (h / cell) as usize + 1;
        let origin = C64::new(x0, y0);
        let bucket = |z: &C64| {
            let i = (((z.re - x0) / cell) as usize).min(nx - 1);
            let j = (((z.im - y0) / cell) as usize).min(ny - 1);
            j * nx + i
        };
        let mut counts = vec![0usize; nx * ny + 1];
        for z in points {
            counts[bucket(z) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let mut fill = counts.clone();
        let mut order = vec![0u32; points.len()];
        for (idx, z) in points.iter().enumerate() {
            let b = bucket(z);
            order[fill[b]] = idx as u32;
            fill[b] += 1;
        }
        Ok(NearestIndex {
            points: points.to_vec(),
            origin,
            cell,
            nx,
            ny,
            starts: counts,
            order,
        })
    }

    /// Distance from `z` to the nearest indexed point.
    pub fn distance(&self, z: C64) -> f64 {
        self.distance_below(z, f64::INFINITY)
    }

    /// `min(bound, distance(z))`, skipping buckets that cannot beat `bound`.
    pub fn distance_below(&self, z: C64, bound: f64) -> f64 {
        let (w, h) = (self.nx as f64 * self.cell, self.ny as f64 * self.cell);
        let ox = (self.origin.re - z.re).max(z.re - (self.origin.re + w)).max(0.0);
        let oy = (self.origin.im - z.im).max(z.im - (self.origin.im + h)).max(0.0);
        if hypot(ox, oy) >= bound {
            return bound;
        }
        let fx = (z.re - self.origin.re) / self.cell;
        let fy = (z.im - self.origin.im) / self.cell;
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        let ci = (floor(fx) as i64).clamp(0, nx - 1);
        let cj = (floor(fy) as i64).clamp(0, ny - 1);
        let mut best = bound;
        let scan = |i: i64, j: i64, best: &mut f64| {
            let b = j as usize * self.nx + i as usize;
            for &idx in &self.order[self.starts[b]..self.starts[b + 1]] {
                *best = best.min((self.points[idx as usize] - z).norm());
            }
        };
        let max_ring = ci.max(nx - 1 - ci).max(cj).max(ny - 1 - cj);
        scan(ci, cj, &mut best);
        for ring in 1..=max_ring {
            // the projection of z onto the grid lies in cell (ci, cj), so every
            // point in this ring is at least (ring - 1) cells away
            if (ring - 1) as f64 * self.cell >= best {
                break;
            }
            let (i0, i1) = ((ci - ring).max(0), (ci + ring).min(nx - 1));
            for j in [cj - ring, cj + ring] {
                if (0..ny).contains(&j) {
                    for i in i0..=i1 {
                        scan(i, j, &mut best);
                    }
                }
            }
            let (j0, j1) = ((cj - ring + 1).max(0), (cj + ring - 1).min(ny - 1));
            for i in [ci - ring, ci + ring] {
                if (0..nx).contains(&i) {
                    for j in j0..=j1 {
                        scan(i, j, &mut best);
                    }
                }
            }
        }
        best
    }
}

/// Symmetric Hausdorff distance between two non-empty clouds; the violation
/// and witness refer to the `a → b` direction.
pub fn set_distance(a: &PointCloud, b: &PointCloud) -> Result<SetDistanceReport, SpectraError> {
    if a.is_empty() || b.is_empty() {
        return Err(SpectraError::EmptyCloud);
    }
    let ib = NearestIndex::new(&b.points)?;
    let ia = NearestIndex::new(&a.points)?;
    let (ab, witness) = one_sided(&a.points, |z| ib.distance(z));
    let (ba, _) = one_sided(&b.points, |z| ia.distance(z));
    Ok(SetDistanceReport {
        hausdorff: ab.max(ba),
        max_violation: ab,
        witness,
    })
}

fn one_sided(points: &[C64], dist: impl Fn(C64) -> f64) -> (f64, C64) {
    let mut worst = 0.0;
    let mut witness = points[0];
    for &z in points {
        let d = dist(z);
        if d > worst {
            worst = d;
            witness = z;
        }
    }
    (worst, witness)
}

/// Largest distance from a point of `inner` to the outer set described by
/// `outer_distance`. Passing means `max_violation ≤ tol`.
pub fn containment_report(
    inner: &PointCloud,
    outer_distance: impl Fn(C64) -> f64,
    tol: f64,
) -> Result<(SetDistanceReport, bool), SpectraError> {
    if inner.is_empty() {
        return Err(SpectraError::EmptyCloud);
    }
    assert!(tol > 0.0, "tolerance must be positive");
    let (worst, witness) = one_sided(&inner.points, outer_distance);
    let report = SetDistanceReport {
        hausdorff: worst,
        max_violation: worst,
        witness,
    };
    Ok((report, worst <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn brute_distance(points: &[C64], z: C64) -> f64 {
        points.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn sigma_small_orders() {
        let s1 = sigma_n(1).unwrap();
        assert_eq!(s1.points, vec![c(0.0, 0.0)]);

        let s2 = sigma_n(2).unwrap();
        assert_eq!(s2.len(), 4);
        for want in [c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
            assert!(brute_distance(&s2.points, want) < 1e-14);
        }

        // n = 3: three reversal classes; ++ gives ±√2, 0; -- gives ±i√2, 0;
        // +- (≅ -+) is nilpotent: λ³
        let s3 = sigma_n(3).unwrap();
        assert_eq!(s3.len(), 9);
        let r2 = 2f64.sqrt();
        for want in [c(r2, 0.0), c(-r2, 0.0), c(0.0, r2), c(0.0, -r2)] {
            assert!(brute_distance(&s3.points, want) < 1e-13);
        }
        let near_zero = s3.points.iter().filter(|z| z.norm() < 1e-4).count();
        assert_eq!(near_zero, 5);
    }

    #[test]
    fn sigma_cap() {
        match sigma_n_with_cap(5, 4) {
            Err(SpectraError::CapExceeded { required_points, .. }) => {
                assert_eq!(required_points, 10 * 5);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(sigma_n(0), Err(SpectraError::ZeroOrder));
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev_cloud(1).points.len(), 1);
        assert!(chebyshev_cloud(1).points[0].norm() < 1e-15);
        let p = chebyshev_cloud(2).points;
        assert!((p[0] - c(-1.0, 0.0)).norm() < 1e-15 && (p[1] - c(1.0, 0.0)).norm() < 1e-15);
        let p = chebyshev_cloud(3).points;
        let r2 = 2f64.sqrt();
        assert!((p[0].re + r2).abs() < 1e-15 && p[1].re.abs() < 1e-15 && (p[2].re - r2).abs() < 1e-15);
    }

    #[test]
    fn pi_one_with_four_phases() {
        // α ∈ {1, i, −1, −i} gives 2cosθ at θ ∈ {0, π/2, π, 3π/2} for b = +,
        // and 2i·sinθ for b = −
        let p = pi_n(1, 4).unwrap();
        assert_eq!(p.len(), 8);
        let mut re: Vec<f64> = p.points.iter().filter(|z| z.im.abs() < 1e-15).map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert_eq!(re.len(), 6);
        assert!((re[0] + 2.0).abs() < 1e-15 && (re[5] - 2.0).abs() < 1e-15);
        assert!(re[1..5].iter().all(|x| x.abs() < 1e-15));
        assert!(brute_distance(&p.points, c(0.0, 2.0)) < 1e-15);
        assert!(brute_distance(&p.points, c(0.0, -2.0)) < 1e-15);
    }

    #[test]
    fn pi_rejects_bad_args() {
        assert_eq!(pi_n(3, 3), Err(SpectraError::AlphaCount(3)));
        assert!(matches!(pi_n_with_budget(3, 256, 10), Err(SpectraError::TooManyPoints { .. })));
    }

    #[test]
    fn pi_three_on_closed_form() {
        let p = pi_n(3, 512).unwrap();
        for z in &p.points {
            assert!(oracle_membership(OracleSet::Pi3, *z) < 1e-9, "{z}");
        }
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_membership(OracleSet::Pi1, c(1.0, 0.0)), 0.0);
        // nearest point of τ_2 to 2 is 1 ± i
        assert!((oracle_membership(OracleSet::Tau2, c(2.0, 0.0)) - 2f64.sqrt()).abs() < 1e-15);
        assert!((oracle_membership(OracleSet::DeltaSquare, c(2.0, 2.0)) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(oracle_membership(OracleSet::DeltaSquare, c(-0.5, 1.4)), 0.0);
        assert!((oracle_membership(OracleSet::DeltaSquare, c(0.0, 5.0)) - 3.0).abs() < 1e-15);
        assert!((oracle_membership(OracleSet::Disc, c(3.0, 4.0)) - 4.0).abs() < 1e-15);
        assert_eq!(oracle_membership(OracleSet::Tau3, c(1.0, 0.0)), 0.0);
        let y: f64 = 0.5;
        let on_arc = c(-sqrt(1.0 + 3.0 * y * y), y);
        assert!(oracle_membership(OracleSet::Tau3, on_arc) < 1e-12);
        assert!(oracle_membership(OracleSet::ITau3, on_arc * c(0.0, 1.0)) < 1e-12);
        assert!(matches!("square".parse::<OracleSet>(), Err(SpectraError::UnknownSet(_))));
        assert_eq!("tau3".parse::<OracleSet>().unwrap(), OracleSet::Tau3);
    }

    #[test]
    fn hyperbola_distance_against_dense_sampling() {
        let arc: Vec<C64> = (0..=200_000)
            .map(|k| {
                let y = -0.5 + k as f64 / 200_000.0;
                c(sqrt(1.0 + 3.0 * y * y), y)
            })
            .collect();
        for z in [c(0.0, 0.0), c(2.0, 0.3), c(1.2, -1.0), c(0.9, 0.1), c(3.0, 3.0)] {
            let brute = brute_distance(&arc, z);
            let got = hyperbola_arc_distance(z, 1.0);
            assert!((brute - got).abs() < 1e-6 && got <= brute + 1e-15, "{z}: {got} vs {brute}");
        }
    }

    #[test]
    fn distance_examples() {
        let a = PointCloud::custom(vec![c(0.0, 0.0)]);
        let b = PointCloud::custom(vec![c(3.0, 4.0)]);
        assert_eq!(set_distance(&a, &b).unwrap().hausdorff, 5.0);
        assert_eq!(set_distance(&a, &a).unwrap().hausdorff, 0.0);
        assert!(matches!(set_distance(&a, &PointCloud::custom(vec![])), Err(SpectraError::EmptyCloud)));

        let s2 = sigma_n(2).unwrap();
        let p1 = pi_n(1, 256).unwrap();
        let r = set_distance(&s2, &p1).unwrap();
        // ±1 sit at phases ±π/3, which a uniform 256-phase grid misses
        assert!(r.max_violation > 0.0 && r.max_violation < alpha_resolution(256), "{r:?}");
        assert!(r.hausdorff >= r.max_violation);
    }

    #[test]
    fn containment_examples() {
        let s4 = sigma_n(4).unwrap();
        let (rep, ok) = containment_report(&s4, |z| oracle_membership(OracleSet::DeltaSquare, z), 1e-12).unwrap();
        assert!(ok, "{rep:?}");
        let ch = chebyshev_cloud(10);
        let (_, ok) = containment_report(&ch, |z| oracle_membership(OracleSet::Pi1, z), 1e-15).unwrap();
        assert!(ok);
    }

    #[test]
    fn four_fold_symmetry_of_small_clouds() {
        for cloud in [sigma_n(6).unwrap(), pi_n(4, 256).unwrap()] {
            let idx = NearestIndex::new(&cloud.points).unwrap();
            for z in &cloud.points {
                for image in [z.conj(), -z, z * c(0.0, 1.0)] {
                    let tol = if z.norm() < 1e-3 { 1e-4 } else { 1e-9 };
                    assert!(idx.distance(image) < tol, "{z} -> {image}");
                }
            }
            assert!(cloud.max_l1() <= 2.0 + DELTA_SLACK);
        }
    }

    proptest! {
        #[test]
        fn nearest_index_matches_brute_force(
            pts in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..300),
            qx in -6.0f64..6.0, qy in -6.0f64..6.0,
        ) {
            let points: Vec<C64> = pts.into_iter().map(|(a, b)| c(a, b)).collect();
            let idx = NearestIndex::new(&points).unwrap();
            let q = c(qx, qy);
            prop_assert!((idx.distance(q) - brute_distance(&points, q)).abs() < 1e-12);
        }

        #[test]
        fn bounded_query_is_min_with_bound(
            pts in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..300),
            qx in -6.0f64..6.0, qy in -6.0f64..6.0, bound in 0.0f64..4.0,
        ) {
            let points: Vec<C64> = pts.into_iter().map(|(a, b)| c(a, b)).collect();
            let idx = NearestIndex::new(&points).unwrap();
            let q = c(qx, qy);
            let want = brute_distance(&points, q).min(bound);
            prop_assert!((idx.distance_below(q, bound) - want).abs() < 1e-12);
        }

        #[test]
        fn delta_square_distance_is_projection(x in -5.0f64..5.0, y in -5.0f64..5.0) {
            // oracle: distance to the boundary polygon by brute-force segment scan
            let z = c(x, y);
            let corners = [c(2.0, 0.0), c(0.0, 2.0), c(-2.0, 0.0), c(0.0, -2.0)];
            let boundary = (0..4)
                .map(|e| segment_distance(z, corners[e], corners[(e + 1) % 4]))
                .fold(f64::INFINITY, f64::min);
            let want = if x.abs() + y.abs() <= 2.0 { 0.0 } else { boundary };
            prop_assert!((oracle_membership(OracleSet::DeltaSquare, z) - want).abs() < 1e-12);
        }
    }
}
