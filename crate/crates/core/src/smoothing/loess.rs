//! Local quadratic regression over pixel neighbourhoods.
//!
//! Each output pixel is the intercept of a weighted least-squares fit of
//! `1, dx, dy, dx^2, dx dy, dy^2` to its `k` nearest pixels (Euclidean
//! distance in index space, all pixels tied with the `k`-th included), with
//! tricube weights `(1 - u^3)^3`, `u = dist / (dist_k + 1)`. The extra pixel in
//! the normaliser keeps the farthest neighbours at positive weight, so the
//! minimum neighbourhood of a 3x3 block still determines a quadratic.
//!
//! The fit is linear in the pixel values, so it reduces to a fixed stencil
//! per neighbourhood shape. Interior pixels share one stencil; pixels near
//! the border get their own, keyed by their clamped distances to each edge.

use std::collections::BTreeMap;

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::par;
use crate::types::ScalarField;

/// Fewest pixels that determine a bivariate quadratic.
pub const MIN_NEIGHBORS: usize = 6;

/// Local quadratic smoother settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoessSpec {
    /// Fraction of all pixels used as each pixel's neighbourhood.
    pub neighbor_fraction: f64,
}

impl Default for LoessSpec {
    fn default() -> Self {
        LoessSpec {
            neighbor_fraction: 0.001,
        }
    }
}

impl LoessSpec {
    /// Neighbourhood size for an image of `pixels` pixels.
    pub fn neighbors(&self, pixels: usize) -> usize {
        let k = (self.neighbor_fraction * pixels as f64).ceil() as usize;
        k.max(MIN_NEIGHBORS).min(pixels)
    }
}

#[derive(Debug, Clone)]
struct Stencil {
    offsets: Vec<(isize, isize)>,
    coeffs: Vec<f64>,
}

type Key = (usize, usize, usize, usize);

fn sorted_offsets(radius: isize) -> Vec<(isize, isize, isize)> {
    let mut v = Vec::with_capacity(((2 * radius + 1) * (2 * radius + 1)) as usize);
    for di in -radius..=radius {
        for dj in -radius..=radius {
            v.push((di * di + dj * dj, di, dj));
        }
    }
    v.sort_unstable();
    v
}

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let c = 1.0 - u * u * u;
        c * c * c
    }
}

fn fit(chosen: &[(isize, isize, isize)]) -> Option<Stencil> {
    let dk = (chosen.last().map(|c| c.0).unwrap_or(0) as f64).sqrt();
    let scale = dk + 1.0;
    let w: Vec<f64> = chosen
        .iter()
        .map(|&(d2, _, _)| tricube((d2 as f64).sqrt() / scale))
        .collect();
    let xs: Vec<SVector<f64, 6>> = chosen
        .iter()
        .map(|&(_, di, dj)| {
            let (x, y) = (dj as f64 / scale, di as f64 / scale);
            SVector::<f64, 6>::from([1.0, x, y, x * x, x * y, y * y])
        })
        .collect();
    let mut m = SMatrix::<f64, 6, 6>::zeros();
    for (x, &wl) in xs.iter().zip(&w) {
        m += x * x.transpose() * wl;
    }
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0 && smin > 1e-10 * smax) {
        return None;
    }
    let mut e1 = SVector::<f64, 6>::zeros();
    e1[0] = 1.0;
    let a = svd.solve(&e1, 0.0).ok()?;
    Some(Stencil {
        offsets: chosen.iter().map(|&(_, di, dj)| (di, dj)).collect(),
        coeffs: xs.iter().zip(&w).map(|(x, &wl)| wl * x.dot(&a)).collect(),
    })
}

fn local_mean(chosen: &[(isize, isize, isize)]) -> Stencil {
    let dk = (chosen.last().map(|c| c.0).unwrap_or(0) as f64).sqrt();
    let w: Vec<f64> = chosen
        .iter()
        .map(|&(d2, _, _)| tricube((d2 as f64).sqrt() / (dk + 1.0)))
        .collect();
    let total: f64 = w.iter().sum();
    Stencil {
        offsets: chosen.iter().map(|&(_, di, dj)| (di, dj)).collect(),
        coeffs: w.iter().map(|wl| wl / total).collect(),
    }
}

/// Builds the stencil of a pixel at `(i, j)` from in-bounds offsets: the `k`
/// nearest plus ties, widened shell by shell while the quadratic design is
/// singular (e.g. along an image border). Falls back to the weighted local
/// mean if widening up to `MAX_GROWTH * k` pixels does not help.
fn build_stencil(offsets: &[(isize, isize, isize)], i: usize, j: usize, rows: usize, cols: usize, k: usize) -> Stencil {
    const MAX_GROWTH: usize = 4;
    let inside: Vec<(isize, isize, isize)> = offsets
        .iter()
        .copied()
        .filter(|&(_, di, dj)| {
            let (r, c) = (i as isize + di, j as isize + dj);
            r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols
        })
        .collect();
    let shell_end = |from: usize| {
        let d2 = inside[from].0;
        from + inside[from..].iter().take_while(|o| o.0 == d2).count()
    };
    let mut end = shell_end(k.min(inside.len()) - 1);
    loop {
        if let Some(s) = fit(&inside[..end]) {
            return s;
        }
        if end >= inside.len() || end >= MAX_GROWTH * k.max(9) {
            return local_mean(&inside[..end]);
        }
        end = shell_end(end);
    }
}

/// Smooths `field` with a local quadratic fit at every pixel.
pub fn loess_smooth(field: &ScalarField, spec: &LoessSpec) -> Result<ScalarField> {
    let (rows, cols) = (field.rows(), field.cols());
    let n = rows * cols;
    if n < MIN_NEIGHBORS {
        return Err(Error::TooFewPixels(n));
    }
    if !(spec.neighbor_fraction > 0.0 && spec.neighbor_fraction <= 1.0) {
        return Err(Error::InvalidValue(format!(
            "neighbor fraction must be in (0, 1], got {}",
            spec.neighbor_fraction
        )));
    }
    let k = spec.neighbors(n);
    let full = rows.max(cols) as isize - 1;
    // A corner pixel sees a quarter disc; the margin covers tied shells and
    // border widening.
    let radius = (((16.0 * k.max(9) as f64 / std::f64::consts::PI).sqrt()).ceil() as isize + 3).min(full);
    let offsets = sorted_offsets(radius);
    let r = radius as usize;
    let key = |i: usize, j: usize| -> Key { (i.min(r), (rows - 1 - i).min(r), j.min(r), (cols - 1 - j).min(r)) };

    let mut reps: BTreeMap<Key, (usize, usize)> = BTreeMap::new();
    for i in 0..rows {
        for j in 0..cols {
            reps.entry(key(i, j)).or_insert((i, j));
        }
    }
    let reps: Vec<(Key, (usize, usize))> = reps.into_iter().collect();
    let stencils: Vec<Stencil> = par::map_slice(&reps, |&(_, (i, j))| build_stencil(&offsets, i, j, rows, cols, k));
    let lookup: BTreeMap<Key, usize> = reps.iter().enumerate().map(|(s, &(k, _))| (k, s)).collect();

    let values = field.values();
    let out_rows: Vec<Vec<f64>> = par::map_range(rows, |i| {
        (0..cols)
            .map(|j| {
                let s = &stencils[lookup[&key(i, j)]];
                s.offsets
                    .iter()
                    .zip(&s.coeffs)
                    .map(|(&(di, dj), &c)| {
                        let idx = (i as isize + di) as usize * cols + (j as isize + dj) as usize;
                        c * values[idx]
                    })
                    .sum()
            })
            .collect()
    });
    ScalarField::new(rows, cols, out_rows.concat(), field.extent)
}
