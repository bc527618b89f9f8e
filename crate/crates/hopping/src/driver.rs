//! Thread-pool drivers for the heavy enumerations.
//!
//! Work is cut into fixed index ranges that do not depend on the thread count,
//! and partial results are folded in range order, so every driver returns the
//! same bits for 1 thread or 64.

use std::path::PathBuf;

use hopping_core::model;
use hopping_core::pseudospectra::{
    self, base_budget, check_order, evaluate_range, index_count, s_n_chunked, symmetry_plan, sweep_base_cell,
    BaseCellResult, GridRegion, GridSpec, Partial, PseudoError, SminResult, DEFAULT_CHUNK, DEFAULT_TRIDIAG_CROSSOVER,
};
use hopping_core::contour::ScalarField;
use hopping_core::spectra::{
    check_pi_args, periodic_points_into, pi_point_count, sigma_n_range, sigma_point_count, sort_points,
    CloudSource, NearestIndex, PointCloud, SpectraError,
};
use hopping_core::C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::checkpoint::{Checkpoint, CheckpointError, RunKey};

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Pseudo(#[from] PseudoError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("stopped after {completed} of {total} chunks; rerun with the same checkpoint to resume")]
    Interrupted { completed: u64, total: u64 },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Runs `f` on a pool with exactly `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, DriverError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| DriverError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Settings for [`s_n`].
#[derive(Debug, Clone)]
pub struct SnConfig {
    /// Gray indices per work unit; part of the result's identity.
    pub chunk: u64,
    pub threads: usize,
    pub checkpoint: Option<PathBuf>,
    /// Stop at the first value below this (membership queries only).
    pub early_cutoff: Option<f64>,
    pub crossover: usize,
    /// Return [`DriverError::Interrupted`] once this many chunks have been
    /// completed in this call (simulates a killed run).
    pub stop_after_chunks: Option<u64>,
}

impl Default for SnConfig {
    fn default() -> Self {
        SnConfig {
            chunk: DEFAULT_CHUNK,
            threads: 1,
            checkpoint: None,
            early_cutoff: None,
            crossover: DEFAULT_TRIDIAG_CROSSOVER,
            stop_after_chunks: None,
        }
    }
}

/// `S_n(λ)` over all reversal-class representatives, in parallel, optionally
/// resuming from and writing to a checkpoint after every batch of chunks.
pub fn s_n(lambda: C64, n: usize, cfg: &SnConfig) -> Result<SminResult, DriverError> {
    check_order(n)?;
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(PseudoError::NonFiniteLambda.into());
    }
    let chunk = cfg.chunk.max(1);
    let key = RunKey::new(n, lambda, chunk, index_count(n), cfg.crossover, cfg.early_cutoff);
    let mut ck = match &cfg.checkpoint {
        Some(path) => Some(Checkpoint::open(path, key)?),
        None => None,
    };
    let mut parts: Vec<Option<Partial>> = vec![None; key.chunk_count() as usize];
    if let Some(c) = &ck {
        for (&k, p) in c.completed() {
            parts[k as usize] = Some(*p);
        }
    }
    let resumed_cutoff = parts.iter().flatten().any(|p| p.cutoff_hit);
    let pending: Vec<u64> = (0..key.chunk_count()).filter(|&k| parts[k as usize].is_none()).collect();
    if pending.len() as u64 != key.chunk_count() {
        log::info!("resuming: {} of {} chunks already done", key.chunk_count() - pending.len() as u64, key.chunk_count());
    }

    let batch = (cfg.threads.max(1) * 2) as u64;
    let mut session = 0u64;
    let mut cutoff_seen = resumed_cutoff;
    with_threads(cfg.threads, || -> Result<(), DriverError> {
        let mut rest = &pending[..];
        while !rest.is_empty() && !cutoff_seen {
            let mut take = batch.min(rest.len() as u64);
            if let Some(stop) = cfg.stop_after_chunks {
                take = take.min(stop.saturating_sub(session));
            }
            if take == 0 {
                return Err(DriverError::Interrupted {
                    completed: key.chunk_count() - rest.len() as u64,
                    total: key.chunk_count(),
                });
            }
            let (now, later) = rest.split_at(take as usize);
            let results: Vec<(u64, Partial)> = now
                .par_iter()
                .map(|&k| {
                    let (start, end) = key.chunk_range(k);
                    (k, evaluate_range(n, lambda, start, end, cfg.early_cutoff, cfg.crossover))
                })
                .collect();
            for &(k, p) in &results {
                parts[k as usize] = Some(p);
                cutoff_seen |= p.cutoff_hit;
                if let Some(c) = ck.as_mut() {
                    c.record(k, p);
                }
            }
            if let Some(c) = &ck {
                c.save()?;
            }
            session += take;
            rest = later;
        }
        Ok(())
    })??;

    let mut acc = Partial::EMPTY;
    for p in parts.iter().flatten() {
        acc.merge(p);
    }
    Ok(acc.finish(n, lambda))
}

/// Serial reference with identical chunking (used to cross-check drivers).
pub fn s_n_reference(lambda: C64, n: usize, cfg: &SnConfig) -> Result<SminResult, DriverError> {
    Ok(s_n_chunked(lambda, n, cfg.early_cutoff, cfg.chunk, cfg.crossover)?)
}

/// Parallel certification: full enumeration, then the certificate or the deficit.
pub fn certify(lambda: C64, n: usize, cfg: &SnConfig) -> Result<(SminResult, pseudospectra::CertifyOutcome), DriverError> {
    let mut cfg = cfg.clone();
    cfg.early_cutoff = None;
    let smin = s_n(lambda, n, &cfg)?;
    let outcome = pseudospectra::certify_from(&smin)?;
    Ok((smin, outcome))
}

/// Gray indices per unit for the σ_n enumeration.
const SIGMA_CHUNK: u64 = 1 << 10;

pub fn sigma_n(n: usize, cap: usize, threads: usize) -> Result<PointCloud, DriverError> {
    if n == 0 {
        return Err(SpectraError::ZeroOrder.into());
    }
    if n > cap || n > 63 {
        return Err(SpectraError::CapExceeded {
            n,
            cap,
            required_points: if n <= 63 { sigma_point_count(n) } else { u64::MAX },
        }
        .into());
    }
    let total = 1u64 << (n - 1);
    let ranges: Vec<(u64, u64)> = (0..total.div_ceil(SIGMA_CHUNK))
        .map(|k| (k * SIGMA_CHUNK, total.min((k + 1) * SIGMA_CHUNK)))
        .collect();
    let parts = with_threads(threads, || {
        ranges
            .par_iter()
            .map(|&(a, b)| sigma_n_range(n, a, b))
            .collect::<Result<Vec<_>, _>>()
    })??;
    let mut points: Vec<C64> = parts.into_iter().flatten().collect();
    sort_points(&mut points);
    Ok(PointCloud {
        points,
        source: CloudSource::Sigma,
        n,
        alpha_count: None,
    })
}

pub fn pi_n(n: usize, alpha_count: usize, max_points: u64, threads: usize) -> Result<PointCloud, DriverError> {
    check_pi_args(n, alpha_count)?;
    let required = pi_point_count(n, alpha_count);
    if required > max_points {
        return Err(SpectraError::TooManyPoints {
            required_points: required,
            max_points,
        }
        .into());
    }
    let reps = model::necklace_representatives(n);
    let parts = with_threads(threads, || {
        reps.par_iter()
            .map(|&mask| {
                let mut out = Vec::new();
                periodic_points_into(n, mask, alpha_count, &mut out).map(|_| out)
            })
            .collect::<Result<Vec<_>, SpectraError>>()
    })??;
    let mut points: Vec<C64> = parts.into_iter().flatten().collect();
    sort_points(&mut points);
    Ok(PointCloud {
        points,
        source: CloudSource::Pi,
        n,
        alpha_count: Some(alpha_count),
    })
}

/// For each query point, the distance to the nearest point of `π_n` sampled
/// at `alpha_count` phases, without holding the whole cloud in memory.
pub fn pi_n_distances(n: usize, alpha_count: usize, queries: &[C64], threads: usize) -> Result<Vec<f64>, DriverError> {
    check_pi_args(n, alpha_count)?;
    let reps = model::necklace_representatives(n);
    let fresh = || vec![f64::INFINITY; queries.len()];
    // Each representative only lowers the running bounds; the elementwise
    // minimum does not depend on how the work is split.
    let best = with_threads(threads, || {
        reps.par_iter()
            .try_fold(fresh, |mut best, &mask| -> Result<Vec<f64>, SpectraError> {
                let mut pts = Vec::new();
                periodic_points_into(n, mask, alpha_count, &mut pts)?;
                let index = NearestIndex::new(&pts)?;
                for (b, &q) in best.iter_mut().zip(queries) {
                    *b = index.distance_below(q, *b);
                }
                Ok(best)
            })
            .try_reduce(fresh, |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.min(y);
                }
                Ok(a)
            })
    })??;
    Ok(best)
}

/// Parallel Lipschitz-pruned sweep; same cells as the serial sweep.
pub fn grid_sweep(spec: GridSpec, threads: usize) -> Result<GridRegion, DriverError> {
    let plan = symmetry_plan(&spec);
    let budget = base_budget(&spec, &plan);
    let swept = with_threads(threads, || {
        plan.compute
            .par_iter()
            .map(|&(ix, iy)| {
                let mut failure = None;
                let mut s_at = |mu: C64| match pseudospectra::s_n_serial(mu, spec.n, Some(spec.eps)) {
                    Ok(r) => r.value,
                    Err(e) => {
                        failure = Some(e);
                        f64::NAN
                    }
                };
                let r = sweep_base_cell(&spec, ix, iy, budget, &mut s_at);
                match failure {
                    Some(e) => Err(e),
                    None => Ok(r),
                }
            })
            .collect::<Result<Vec<BaseCellResult>, PseudoError>>()
    })??;
    Ok(GridRegion::assemble(spec, &plan, swept))
}

/// `S_n` on a `resolution × resolution` lattice (corners included), rows in parallel.
pub fn sample_field(n: usize, bbox: &pseudospectra::GridBox, resolution: usize, threads: usize) -> Result<ScalarField, DriverError> {
    check_order(n)?;
    if resolution < 2 {
        return Err(PseudoError::BadGrid("field resolution must be at least 2").into());
    }
    let dx = bbox.width() / (resolution - 1) as f64;
    let dy = bbox.height() / (resolution - 1) as f64;
    let origin = C64::new(bbox.re_min, bbox.im_min);
    let rows = with_threads(threads, || {
        (0..resolution)
            .into_par_iter()
            .map(|j| {
                (0..resolution)
                    .map(|i| {
                        let z = origin + C64::new(i as f64 * dx, j as f64 * dy);
                        pseudospectra::s_n_serial(z, n, None).map(|r| r.value)
                    })
                    .collect::<Result<Vec<f64>, PseudoError>>()
            })
            .collect::<Result<Vec<_>, _>>()
    })??;
    Ok(ScalarField {
        nx: resolution,
        ny: resolution,
        origin,
        dx,
        dy,
        values: rows.into_iter().flatten().collect(),
    })
}
