use crate::error::{Error, Result};
use crate::homology::superlevel_diagram;
use crate::kernel::Kernel;
use crate::par;
use crate::types::{Extent, PersistenceDiagram, PointCloud, ScalarField};

/// Kernel density estimate settings: radial kernel, bandwidth and output grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdeSpec {
    pub kernel: Kernel,
    pub h: f64,
    pub rows: usize,
    pub cols: usize,
    pub extent: Extent,
}

impl KdeSpec {
    /// Grid over the bounding box of `points` padded by `3h` on every side.
    pub fn padded(points: &PointCloud, kernel: Kernel, h: f64, rows: usize, cols: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
        let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points.iter() {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        let pad = 3.0 * h;
        Ok(KdeSpec {
            kernel,
            h,
            rows,
            cols,
            extent: Extent::new(x0 - pad, y0 - pad, x1 + pad, y1 + pad),
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::BadBandwidth(self.h));
        }
        let e = self.extent;
        if self.rows == 0 || self.cols == 0 || !(e.x1 > e.x0) || !(e.y1 > e.y0) {
            return Err(Error::InvalidValue("degenerate KDE grid".into()));
        }
        Ok(())
    }
}

/// `p(x) = 1 / (n h^2) sum_i K(|X_i - x| / h)` evaluated at every grid cell center.
pub fn kde(points: &PointCloud, spec: &KdeSpec) -> Result<ScalarField> {
    if points.dim() != 2 {
        return Err(Error::InvalidValue(format!(
            "KDE needs planar points, got dimension {}",
            points.dim()
        )));
    }
    if points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    spec.validate()?;

    // Sorted by (y, x): gives a canonical summation order and lets each row
    // scan only the points within reach.
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p[1], p[0])).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let n = pts.len() as f64;
    let h = spec.h;
    let reach = spec.kernel.density_support() * h;
    let norm = 1.0 / (n * h * h);
    let e = spec.extent;

    let rows: Vec<Vec<f64>> = par::map_range(spec.rows, |i| {
        let y = cell_center(e.y0, e.y1, i, spec.rows);
        let lo = pts.partition_point(|p| p.0 < y - reach);
        let hi = pts.partition_point(|p| p.0 <= y + reach);
        let near = &pts[lo..hi];
        (0..spec.cols)
            .map(|j| {
                let x = cell_center(e.x0, e.x1, j, spec.cols);
                // fold from +0.0: an empty `sum` is -0.0
                let s = near.iter().fold(0.0, |acc, &(py, px)| {
                    let r = ((px - x).powi(2) + (py - y).powi(2)).sqrt() / h;
                    acc + spec.kernel.radial_density(r)
                });
                s * norm
            })
            .collect()
    });
    ScalarField::new(spec.rows, spec.cols, rows.concat(), spec.extent)
}

/// Center of cell `i` of `n` on `[a, b]`, written so that mirrored cells on
/// a symmetric interval get exactly negated coordinates.
pub(crate) fn cell_center(a: f64, b: f64, i: usize, n: usize) -> f64 {
    let n = n as f64;
    let u = i as f64 + 0.5;
    ((n - u) * a + u * b) / n
}

/// Superlevel diagram of the KDE of a point cloud.
pub fn point_cloud_diagram(points: &PointCloud, spec: &KdeSpec, max_dim: usize) -> Result<PersistenceDiagram> {
    if max_dim > 1 {
        return Err(Error::BadMaxDim(max_dim));
    }
    let field = kde(points, spec)?;
    Ok(superlevel_diagram(&field, max_dim)?.with_source(format!(
        "kde kernel={} h={} grid={}x{}",
        spec.kernel, spec.h, spec.rows, spec.cols
    )))
}
