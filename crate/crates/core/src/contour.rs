//! Level curves of a sampled scalar field by marching squares.
//!
//! Crossings are placed on grid edges by linear interpolation. Each crossing
//! is keyed by the edge it sits on, so segments from neighbouring cells share
//! endpoints exactly and can be chained into polylines. Saddle cells are
//! resolved with the mean of the four corners.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::C64;

/// Values on an `nx × ny` lattice of points `(x0 + i·dx, y0 + j·dy)`, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub nx: usize,
    pub ny: usize,
    pub origin: C64,
    pub dx: f64,
    pub dy: f64,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn from_fn(nx: usize, ny: usize, origin: C64, dx: f64, dy: f64, mut f: impl FnMut(C64) -> f64) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(origin + C64::new(i as f64 * dx, j as f64 * dy)));
            }
        }
        ScalarField {
            nx,
            ny,
            origin,
            dx,
            dy,
            values,
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn point(&self, i: usize, j: usize) -> C64 {
        self.origin + C64::new(i as f64 * self.dx, j as f64 * self.dy)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<C64>,
    pub closed: bool,
}

/// Grid edge: horizontal edges run from `(i, j)` to `(i+1, j)`, vertical ones to `(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

fn crossing(field: &ScalarField, edge: Edge, level: f64) -> C64 {
    let (a, b, pa, pb) = match edge {
        Edge::H(i, j) => (field.at(i, j), field.at(i + 1, j), field.point(i, j), field.point(i + 1, j)),
        Edge::V(i, j) => (field.at(i, j), field.at(i, j + 1), field.point(i, j), field.point(i, j + 1)),
    };
    let t = if a == b { 0.5 } else { ((level - a) / (b - a)).clamp(0.0, 1.0) };
    pa + (pb - pa) * t
}

/// Polylines where the field crosses `level`. A corner counts as inside when
/// its value is below `level`; closed curves come back with `closed = true`.
pub fn marching_squares(field: &ScalarField, level: f64) -> Vec<Polyline> {
    if field.nx < 2 || field.ny < 2 {
        return Vec::new();
    }
    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for j in 0..field.ny - 1 {
        for i in 0..field.nx - 1 {
            let v = [field.at(i, j), field.at(i + 1, j), field.at(i + 1, j + 1), field.at(i, j + 1)];
            let idx = v
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &x)| acc | (((x < level) as u8) << k));
            // edges: bottom, right, top, left
            let (b, r, t, l) = (Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j));
            let center_in = (v[0] + v[1] + v[2] + v[3]) / 4.0 < level;
            match idx {
                0 | 15 => {}
                1 | 14 => segments.push((l, b)),
                2 | 13 => segments.push((b, r)),
                3 | 12 => segments.push((l, r)),
                4 | 11 => segments.push((r, t)),
                6 | 9 => segments.push((b, t)),
                7 | 8 => segments.push((l, t)),
                5 => {
                    // corners 0 and 2 inside
                    if center_in {
                        segments.push((l, t));
                        segments.push((b, r));
                    } else {
                        segments.push((l, b));
                        segments.push((r, t));
                    }
                }
                10 => {
                    // corners 1 and 3 inside
                    if center_in {
                        segments.push((l, b));
                        segments.push((r, t));
                    } else {
                        segments.push((l, t));
                        segments.push((b, r));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    chain(field, level, &segments)
}

fn chain(field: &ScalarField, level: f64, segments: &[(Edge, Edge)]) -> Vec<Polyline> {
    // each edge touches at most two segments
    let mut touching: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        touching.entry(a).or_default().push(k);
        touching.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let other = |k: usize, e: Edge| if segments[k].0 == e { segments[k].1 } else { segments[k].0 };

    // open chains start at edges with a single segment, so walk those first
    let mut starts: Vec<Edge> = touching
        .iter()
        .filter(|(_, ks)| ks.len() == 1)
        .map(|(e, _)| *e)
        .collect();
    starts.extend(touching.keys().copied());
    for start in starts {
        let mut edges = vec![start];
        let mut at = start;
        loop {
            let next = touching[&at].iter().copied().find(|&k| !used[k]);
            let Some(k) = next else { break };
            used[k] = true;
            at = other(k, at);
            edges.push(at);
        }
        if edges.len() < 2 {
            continue;
        }
        let closed = edges.len() > 2 && edges.first() == edges.last();
        if closed {
            edges.pop();
        }
        out.push(Polyline {
            points: edges.into_iter().map(|e| crossing(field, e, level)).collect(),
            closed,
        });
    }
    out
}
