//! Functional summaries of persistence diagrams.
//!
//! Every univariate summary is sampled on a [`Grid1D`] and only looks at the
//! points of one homology dimension. Points on the diagonal are kept in
//! diagrams but skipped here: their tents, bumps and weights are all zero.

use std::fmt;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::types::{CurveParams, DiagramPoint, Grid1D, PersistenceDiagram, SummaryCurve, SummaryKind};

/// Number of samples of the default grid.
pub const DEFAULT_GRID_SIZE: usize = 512;

fn off_diagonal(diagram: &PersistenceDiagram, dim: usize) -> Vec<DiagramPoint> {
    diagram
        .points
        .iter()
        .copied()
        .filter(|p| p.dim == dim && p.lifetime() > 0.0)
        .collect()
}

/// Tent `min(t - b, d - t)_+`.
#[inline]
pub fn tent(p: &DiagramPoint, t: f64) -> f64 {
    (t - p.birth).min(p.death - t).max(0.0)
}

/// Kernel bump through the rotated point `(x_j, y_j)`: `y_j K((t - x_j)/h) / K(0)`.
#[inline]
pub fn bump(p: &DiagramPoint, kernel: Kernel, h: f64, t: f64) -> f64 {
    let u = (t - p.center()) / h;
    if u.abs() > 1.0 {
        0.0
    } else {
        p.half_life() * kernel.eval(u) / kernel.eval(0.0)
    }
}

/// Rows `k = 1..=k_max` of the pointwise k-th largest of `f_j(t)`.
fn k_largest(points: &[DiagramPoint], k_max: usize, grid: &Grid1D, f: impl Fn(&DiagramPoint, f64) -> f64) -> Vec<Vec<f64>> {
    let mut orders = vec![vec![0.0; grid.len()]; k_max];
    let mut buf = Vec::with_capacity(points.len());
    for (i, t) in grid.points().enumerate() {
        buf.clear();
        buf.extend(points.iter().map(|p| f(p, t)).filter(|&v| v > 0.0));
        if buf.is_empty() {
            continue;
        }
        if buf.len() > k_max {
            buf.select_nth_unstable_by(k_max - 1, |a, b| b.total_cmp(a));
            buf.truncate(k_max);
        }
        buf.sort_unstable_by(|a, b| b.total_cmp(a));
        for (k, &v) in buf.iter().enumerate() {
            orders[k][i] = v;
        }
    }
    orders
}

/// Persistence landscape: row `k` is the k-th largest tent at each grid point
/// (zero where fewer than `k` tents are positive).
pub fn landscape(diagram: &PersistenceDiagram, dim: usize, k_max: usize, grid: Grid1D) -> Result<SummaryCurve> {
    if k_max == 0 {
        return Err(Error::InvalidValue("k_max must be at least 1".into()));
    }
    let pts = off_diagonal(diagram, dim);
    let orders = k_largest(&pts, k_max, &grid, tent);
    Ok(SummaryCurve::new(grid, orders, SummaryKind::Landscape)?.with_params(CurveParams {
        dim: Some(dim),
        ..Default::default()
    }))
}

/// Generalized landscape: tents replaced by kernel bumps of half-width `h`
/// centred at `x_j` with height `y_j`.
pub fn generalized_landscape(
    diagram: &PersistenceDiagram,
    dim: usize,
    kernel: Kernel,
    h: f64,
    k_max: usize,
    grid: Grid1D,
) -> Result<SummaryCurve> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::BadBandwidth(h));
    }
    if k_max == 0 {
        return Err(Error::InvalidValue("k_max must be at least 1".into()));
    }
    let pts = off_diagonal(diagram, dim);
    let orders = k_largest(&pts, k_max, &grid, |p, t| bump(p, kernel, h, t));
    Ok(
        SummaryCurve::new(grid, orders, SummaryKind::GeneralizedLandscape)?.with_params(CurveParams {
            dim: Some(dim),
            kernel: Some(kernel),
            bandwidth: Some(h),
            weight_power: None,
        }),
    )
}

/// Silhouette with weights `|d - b|^p`: the weighted average of the tents.
pub fn silhouette(diagram: &PersistenceDiagram, dim: usize, p: f64, grid: Grid1D) -> Result<SummaryCurve> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidValue(format!("silhouette power must be positive, got {p}")));
    }
    let pts = off_diagonal(diagram, dim);
    let weights: Vec<f64> = pts.iter().map(|q| q.lifetime().abs().powf(p)).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::EmptySilhouette);
    }
    let values = grid
        .points()
        .map(|t| pts.iter().zip(&weights).map(|(q, w)| w * tent(q, t)).sum::<f64>() / total)
        .collect();
    Ok(SummaryCurve::new(grid, vec![values], SummaryKind::Silhouette)?.with_params(CurveParams {
        dim: Some(dim),
        weight_power: Some(p),
        ..Default::default()
    }))
}

/// Accumulative persistence function `sum_j (d_j - b_j) I(d_j + b_j <= 2t)`.
pub fn apf(diagram: &PersistenceDiagram, dim: usize, grid: Grid1D) -> Result<SummaryCurve> {
    let pts = off_diagonal(diagram, dim);
    let values = grid
        .points()
        .map(|t| {
            pts.iter()
                .filter(|q| q.death + q.birth <= 2.0 * t)
                .map(DiagramPoint::lifetime)
                .fold(0.0, |a, b| a + b)
        })
        .collect();
    Ok(SummaryCurve::new(grid, vec![values], SummaryKind::Apf)?.with_params(CurveParams {
        dim: Some(dim),
        ..Default::default()
    }))
}

/// Persistence intensity sampled on a birth x death grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SummarySurface {
    pub birth_grid: Grid1D,
    pub death_grid: Grid1D,
    /// `values[a][b]` at `(birth_grid[a], death_grid[b])`.
    pub values: Vec<Vec<f64>>,
    pub kernel: Kernel,
    pub h: f64,
    pub weight_power: f64,
}

/// `(1/|D|) sum_j |d_j - b_j|^p K(|(b_j, d_j) - (t, s)| / h)` with `|D|` the
/// number of off-diagonal points.
pub fn intensity(
    diagram: &PersistenceDiagram,
    kernel: Kernel,
    h: f64,
    weight_power: f64,
    birth_grid: Grid1D,
    death_grid: Grid1D,
) -> Result<SummarySurface> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::BadBandwidth(h));
    }
    if !weight_power.is_finite() {
        return Err(Error::InvalidValue("weight power must be finite".into()));
    }
    let pts: Vec<DiagramPoint> = diagram.points.iter().copied().filter(|p| p.lifetime() > 0.0).collect();
    if pts.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    let n = pts.len() as f64;
    let weights: Vec<f64> = pts.iter().map(|p| p.lifetime().abs().powf(weight_power)).collect();
    let values = birth_grid
        .points()
        .map(|t| {
            death_grid
                .points()
                .map(|s| {
                    pts.iter()
                        .zip(&weights)
                        .map(|(p, w)| {
                            let r = ((p.birth - t).powi(2) + (p.death - s).powi(2)).sqrt() / h;
                            w * kernel.eval(r)
                        })
                        .sum::<f64>()
                        / n
                })
                .collect()
        })
        .collect();
    Ok(SummarySurface {
        birth_grid,
        death_grid,
        values,
        kernel,
        h,
        weight_power,
    })
}

/// Row-major flattening of a surface.
pub fn persistence_image(surface: &SummarySurface) -> Vec<f64> {
    surface.values.iter().flatten().copied().collect()
}

/// Grid spanning `[min birth, max death]` of the given diagrams' points of
/// `dim`, padded by 5% each side, with [`DEFAULT_GRID_SIZE`] samples.
pub fn default_grid<'a>(diagrams: impl IntoIterator<Item = &'a PersistenceDiagram>, dim: usize) -> Grid1D {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for d in diagrams {
        for p in d.points.iter().filter(|p| p.dim == dim) {
            lo = lo.min(p.birth);
            hi = hi.max(p.death);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Grid1D::new(0.0, 1.0, DEFAULT_GRID_SIZE).expect("valid default grid");
    }
    if hi - lo <= 0.0 {
        let half = 0.5 * lo.abs().max(1.0);
        return Grid1D::new(lo - half, hi + half, DEFAULT_GRID_SIZE).expect("valid default grid");
    }
    let pad = 0.05 * (hi - lo);
    Grid1D::new(lo - pad, hi + pad, DEFAULT_GRID_SIZE).expect("valid default grid")
}

/// A summary recipe, for pipelines that apply the same summary to many diagrams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SummarySpec {
    Landscape { k_max: usize },
    GeneralizedLandscape { kernel: Kernel, h: f64, k_max: usize },
    Silhouette { p: f64 },
    Apf,
}

impl SummarySpec {
    pub fn apply(&self, diagram: &PersistenceDiagram, dim: usize, grid: Grid1D) -> Result<SummaryCurve> {
        match *self {
            SummarySpec::Landscape { k_max } => landscape(diagram, dim, k_max, grid),
            SummarySpec::GeneralizedLandscape { kernel, h, k_max } => {
                generalized_landscape(diagram, dim, kernel, h, k_max, grid)
            }
            SummarySpec::Silhouette { p } => silhouette(diagram, dim, p, grid),
            SummarySpec::Apf => apf(diagram, dim, grid),
        }
    }

    pub fn k_max(&self) -> usize {
        match *self {
            SummarySpec::Landscape { k_max } | SummarySpec::GeneralizedLandscape { k_max, .. } => k_max,
            _ => 1,
        }
    }
}

impl fmt::Display for SummarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SummarySpec::Landscape { .. } => write!(f, "landscape"),
            SummarySpec::GeneralizedLandscape { kernel, h, .. } => write!(f, "glandscape_{kernel}_h{h}"),
            SummarySpec::Silhouette { p } => write!(f, "silhouette_p{p}"),
            SummarySpec::Apf => write!(f, "apf"),
        }
    }
}

/// Parses `landscape:K`, `glandscape:KERNEL:H:K`, `silhouette:P` or `apf`.
/// Omitted trailing fields default to `K = 1`, `P = 1`.
impl std::str::FromStr for SummarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let bad = || Error::InvalidValue(format!("cannot parse summary '{s}'"));
        let num = |i: usize| -> Result<Option<f64>> {
            parts.get(i).map(|v| v.parse::<f64>().map_err(|_| bad())).transpose()
        };
        let count = |i: usize| -> Result<usize> {
            match parts.get(i) {
                None => Ok(1),
                Some(v) => v.parse::<usize>().ok().filter(|&k| k >= 1).ok_or_else(bad),
            }
        };
        let spec = match parts[0] {
            "landscape" if parts.len() <= 2 => SummarySpec::Landscape { k_max: count(1)? },
            "glandscape" if (3..=4).contains(&parts.len()) => {
                let h = num(2)?.ok_or_else(bad)?;
                if !(h > 0.0) || !h.is_finite() {
                    return Err(Error::BadBandwidth(h));
                }
                SummarySpec::GeneralizedLandscape {
                    kernel: parts[1].parse()?,
                    h,
                    k_max: count(3)?,
                }
            }
            "silhouette" if parts.len() <= 2 => {
                let p = num(1)?.unwrap_or(1.0);
                if !(p > 0.0) || !p.is_finite() {
                    return Err(bad());
                }
                SummarySpec::Silhouette { p }
            }
            "apf" if parts.len() == 1 => SummarySpec::Apf,
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}
