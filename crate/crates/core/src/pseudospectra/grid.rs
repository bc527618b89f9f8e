//! Lipschitz-pruned quadtree sweep of `S_n` over a rectangle.
//!
//! A cell whose center `μ` has `S_n(μ) − ε ≥ R` (circumradius) is excluded
//! outright, since `S_n(λ) ≥ S_n(μ) − |λ − μ| ≥ ε` on the whole cell. A center
//! with `S_n(μ) < ε` is a witness of the sublevel set. Anything else splits
//! into four children until the depth limit or the evaluation budget runs out.
//!
//! Boxes symmetric about both axes are swept over one quadrant and completed by
//! reflection; square ones with matching resolution over one octant.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_order, eps_n, s_n_serial, PseudoError};
use crate::contour::{marching_squares, Polyline, ScalarField};
use crate::float::{round, sqrt};
use crate::C64;

/// Default cap on the total number of `S_n` evaluations in one sweep.
pub const DEFAULT_EVALUATION_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl GridBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, PseudoError> {
        let ok = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) && re_min < re_max && im_min < im_max;
        if !ok {
            return Err(PseudoError::BadGrid("box corners must be finite with min < max"));
        }
        Ok(GridBox {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    /// The square `[−r, r] × [−r, r]`.
    pub fn centered(r: f64) -> Result<Self, PseudoError> {
        GridBox::new(-r, r, -r, r)
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn is_axis_symmetric(&self) -> bool {
        self.re_min == -self.re_max && self.im_min == -self.im_max
    }

    pub fn is_symmetric_square(&self) -> bool {
        self.is_axis_symmetric() && self.re_max == self.im_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub bbox: GridBox,
    pub n: usize,
    pub eps: f64,
    /// Base cells per axis.
    pub base_resolution: usize,
    pub max_depth: u32,
    pub evaluation_cap: u64,
    /// Complete symmetric boxes by reflection instead of sweeping them whole.
    pub use_symmetry: bool,
}

impl GridSpec {
    pub fn new(bbox: GridBox, n: usize, eps: f64, base_resolution: usize, max_depth: u32) -> Result<Self, PseudoError> {
        check_order(n)?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(PseudoError::BadEps(eps));
        }
        if base_resolution == 0 || base_resolution > 1 << 14 {
            return Err(PseudoError::BadGrid("base resolution must be in 1..=16384"));
        }
        if max_depth > 12 {
            return Err(PseudoError::BadGrid("max depth must be at most 12"));
        }
        Ok(GridSpec {
            bbox,
            n,
            eps,
            base_resolution,
            max_depth,
            evaluation_cap: DEFAULT_EVALUATION_CAP,
            use_symmetry: true,
        })
    }

    pub fn base_half_sizes(&self) -> (f64, f64) {
        let r = self.base_resolution as f64;
        (self.bbox.width() / r / 2.0, self.bbox.height() / r / 2.0)
    }

    pub fn base_center(&self, ix: usize, iy: usize) -> C64 {
        let r = self.base_resolution as f64;
        C64::new(
            self.bbox.re_min + (ix as f64 + 0.5) * self.bbox.width() / r,
            self.bbox.im_min + (iy as f64 + 0.5) * self.bbox.height() / r,
        )
    }

    /// Pixels per axis of the finest raster.
    pub fn raster_resolution(&self) -> usize {
        self.base_resolution << self.max_depth
    }

    /// Upper bound on `S_n` evaluations if nothing is pruned.
    pub fn worst_case_evaluations(&self) -> u64 {
        let per_base: u64 = (0..=self.max_depth).map(|d| 1u64 << (2 * d)).sum();
        (self.base_resolution as u64).pow(2).saturating_mul(per_base)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellClass {
    Excluded,
    IncludedLower,
    Unknown,
}

impl CellClass {
    pub fn tag(self) -> &'static str {
        match self {
            CellClass::Excluded => "excluded",
            CellClass::IncludedLower => "included",
            CellClass::Unknown => "unknown",
        }
    }

    pub fn gray_level(self) -> u8 {
        match self {
            CellClass::Excluded => 0,
            CellClass::Unknown => 128,
            CellClass::IncludedLower => 255,
        }
    }
}

/// A leaf of the refinement tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub center: C64,
    pub half_width: f64,
    pub half_height: f64,
    pub depth: u32,
    pub class: CellClass,
    /// `S_n` at the center (an upper bound for witnesses found by cutoff);
    /// NaN when the budget ran out before the center was evaluated.
    pub s: f64,
}

impl Cell {
    pub fn circumradius(&self) -> f64 {
        sqrt(self.half_width * self.half_width + self.half_height * self.half_height)
    }
}

/// Result of sweeping one base cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseCellResult {
    pub leaves: Vec<Cell>,
    pub evaluations: u64,
    pub complete: bool,
}

/// Refines base cell `(ix, iy)` depth-first (children in the order SW, SE, NW, NE)
/// using at most `budget` evaluations of `s_at`, which must return `S_n(μ)`
/// or any value below `eps` when `S_n(μ) < eps`.
pub fn sweep_base_cell(spec: &GridSpec, ix: usize, iy: usize, budget: u64, s_at: &mut dyn FnMut(C64) -> f64) -> BaseCellResult {
    let (hw, hh) = spec.base_half_sizes();
    let mut stack = vec![(spec.base_center(ix, iy), hw, hh, 0u32)];
    let mut leaves = Vec::new();
    let mut evaluations = 0u64;
    let mut complete = true;
    while let Some((center, hw, hh, depth)) = stack.pop() {
        let mut cell = Cell {
            center,
            half_width: hw,
            half_height: hh,
            depth,
            class: CellClass::Unknown,
            s: f64::NAN,
        };
        if evaluations >= budget {
            complete = false;
            leaves.push(cell);
            continue;
        }
        let s = s_at(center);
        evaluations += 1;
        cell.s = s;
        if s < spec.eps {
            cell.class = CellClass::IncludedLower;
        } else if s - spec.eps >= cell.circumradius() {
            cell.class = CellClass::Excluded;
        } else if depth < spec.max_depth {
            let (qw, qh) = (hw / 2.0, hh / 2.0);
            // pushed in reverse so SW pops first
            for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
                stack.push((center + C64::new(sx * qw, sy * qh), qw, qh, depth + 1));
            }
            continue;
        }
        leaves.push(cell);
    }
    BaseCellResult {
        leaves,
        evaluations,
        complete,
    }
}

/// How a base cell is obtained from a swept one: swap coordinates (if set),
/// then scale by the signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Image {
    pub target: (usize, usize),
    pub source: (usize, usize),
    pub flip_re: bool,
    pub flip_im: bool,
    pub swap: bool,
}

impl Image {
    pub fn apply(&self, cell: &Cell) -> Cell {
        let mut c = *cell;
        if self.swap {
            c.center = C64::new(c.center.im, c.center.re);
            core::mem::swap(&mut c.half_width, &mut c.half_height);
        }
        if self.flip_re {
            c.center.re = -c.center.re;
        }
        if self.flip_im {
            c.center.im = -c.center.im;
        }
        c
    }
}

/// Which base cells to sweep and how to fill the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    /// Base cells to sweep, row-major order.
    pub compute: Vec<(usize, usize)>,
    /// One entry per base cell, row-major, naming its source among `compute`.
    pub images: Vec<Image>,
}

pub fn symmetry_plan(spec: &GridSpec) -> SweepPlan {
    let r = spec.base_resolution;
    let axis = spec.use_symmetry && spec.bbox.is_axis_symmetric();
    let dihedral = axis && spec.bbox.is_symmetric_square();
    let mut compute = Vec::new();
    let mut images = Vec::with_capacity(r * r);
    for iy in 0..r {
        for ix in 0..r {
            if !axis {
                compute.push((ix, iy));
                images.push(Image {
                    target: (ix, iy),
                    source: (ix, iy),
                    flip_re: false,
                    flip_im: false,
                    swap: false,
                });
                continue;
            }
            // fold into the closed first quadrant
            let (fx, flip_re) = if 2 * ix + 1 < r { (r - 1 - ix, true) } else { (ix, false) };
            let (fy, flip_im) = if 2 * iy + 1 < r { (r - 1 - iy, true) } else { (iy, false) };
            let (source, swap) = if dihedral && fy > fx { ((fy, fx), true) } else { ((fx, fy), false) };
            if source == (ix, iy) {
                compute.push(source);
            }
            images.push(Image {
                target: (ix, iy),
                source,
                flip_re,
                flip_im,
                swap,
            });
        }
    }
    SweepPlan { compute, images }
}

/// Per-base-cell evaluation budget for a plan.
pub fn base_budget(spec: &GridSpec, plan: &SweepPlan) -> u64 {
    (spec.evaluation_cap / plan.compute.len().max(1) as u64).max(1)
}

/// Classified leaves covering the whole box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRegion {
    pub spec: GridSpec,
    /// Leaves grouped by base cell in row-major order.
    pub cells: Vec<Cell>,
    pub evaluations: u64,
    /// False when some cell stayed unevaluated because the budget ran out.
    pub complete: bool,
    pub symmetry_used: bool,
}

impl GridRegion {
    /// Assembles the region from swept base cells (in `plan.compute` order).
    pub fn assemble(spec: GridSpec, plan: &SweepPlan, swept: Vec<BaseCellResult>) -> GridRegion {
        assert_eq!(swept.len(), plan.compute.len());
        let r = spec.base_resolution;
        let mut by_index: Vec<Option<usize>> = vec![None; r * r];
        for (k, &(ix, iy)) in plan.compute.iter().enumerate() {
            by_index[iy * r + ix] = Some(k);
        }
        let mut cells = Vec::new();
        for image in &plan.images {
            let (sx, sy) = image.source;
            let src = &swept[by_index[sy * r + sx].expect("source cells are swept")];
            cells.extend(src.leaves.iter().map(|c| image.apply(c)));
        }
        GridRegion {
            spec,
            cells,
            evaluations: swept.iter().map(|b| b.evaluations).sum(),
            complete: swept.iter().all(|b| b.complete),
            symmetry_used: plan.compute.len() < plan.images.len(),
        }
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|c| c.class == class).count()
    }
}

/// Serial sweep with `S_n` evaluated by [`s_n_serial`] (cutoff at `eps`).
pub fn grid_sweep(spec: GridSpec) -> Result<GridRegion, PseudoError> {
    let plan = symmetry_plan(&spec);
    let budget = base_budget(&spec, &plan);
    let mut err = None;
    let mut s_at = |mu: C64| match s_n_serial(mu, spec.n, Some(spec.eps)) {
        Ok(r) => r.value,
        Err(e) => {
            err = Some(e);
            f64::NAN
        }
    };
    let swept: Vec<BaseCellResult> = plan
        .compute
        .iter()
        .map(|&(ix, iy)| sweep_base_cell(&spec, ix, iy, budget, &mut s_at))
        .collect();
    if let Some(e) = err {
        return Err(e);
    }
    Ok(GridRegion::assemble(spec, &plan, swept))
}

/// Row-major gray levels of the finest raster, first row at the top (largest
/// imaginary part). Returns `(width, height, pixels)`.
pub fn raster(region: &GridRegion) -> (usize, usize, Vec<u8>) {
    let spec = &region.spec;
    let res = spec.raster_resolution();
    let px_w = spec.bbox.width() / res as f64;
    let px_h = spec.bbox.height() / res as f64;
    let mut pixels = vec![CellClass::Unknown.gray_level(); res * res];
    for cell in &region.cells {
        let x0 = round((cell.center.re - cell.half_width - spec.bbox.re_min) / px_w) as isize;
        let x1 = round((cell.center.re + cell.half_width - spec.bbox.re_min) / px_w) as isize;
        let y0 = round((cell.center.im - cell.half_height - spec.bbox.im_min) / px_h) as isize;
        let y1 = round((cell.center.im + cell.half_height - spec.bbox.im_min) / px_h) as isize;
        let level = cell.class.gray_level();
        for y in y0.max(0)..y1.min(res as isize) {
            let row = res - 1 - y as usize;
            for x in x0.max(0)..x1.min(res as isize) {
                pixels[row * res + x as usize] = level;
            }
        }
    }
    (res, res, pixels)
}

/// `S_n` sampled at the `resolution × resolution` lattice spanning `bbox`
/// (corners included), evaluated serially.
pub fn sample_field(n: usize, bbox: &GridBox, resolution: usize) -> Result<ScalarField, PseudoError> {
    check_order(n)?;
    if resolution < 2 {
        return Err(PseudoError::BadGrid("field resolution must be at least 2"));
    }
    let dx = bbox.width() / (resolution - 1) as f64;
    let dy = bbox.height() / (resolution - 1) as f64;
    let origin = C64::new(bbox.re_min, bbox.im_min);
    let mut err = None;
    let field = ScalarField::from_fn(resolution, resolution, origin, dx, dy, |z| match s_n_serial(z, n, None) {
        Ok(r) => r.value,
        Err(e) => {
            err = Some(e);
            f64::NAN
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(field),
    }
}

/// Level curves of a sampled `S_n` field at `eps`. Cosmetic only.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryResult {
    pub polylines: Vec<Polyline>,
    pub field_min: f64,
    pub field_max: f64,
    /// `eps` lies outside `[field_min, field_max]`, so no level curve exists
    /// on the sampled window (everything is inside or everything is outside).
    pub degenerate: bool,
}

pub fn boundary_from_field(field: &ScalarField, eps: f64) -> BoundaryResult {
    let (field_min, field_max) = field.min_max();
    let degenerate = !(field_min < eps && eps <= field_max);
    BoundaryResult {
        polylines: if degenerate { Vec::new() } else { marching_squares(field, eps) },
        field_min,
        field_max,
        degenerate,
    }
}

/// Level curves of `S_n` at `eps` (default `ε_n` when `eps` is `None`).
pub fn sigma_eps_boundary(n: usize, eps: Option<f64>, bbox: &GridBox, resolution: usize) -> Result<BoundaryResult, PseudoError> {
    let eps = match eps {
        Some(e) if e > 0.0 && e.is_finite() => e,
        Some(e) => return Err(PseudoError::BadEps(e)),
        None => eps_n(n)?,
    };
    let field = sample_field(n, bbox, resolution)?;
    Ok(boundary_from_field(&field, eps))
}
