//! Domain types shared by every stage of the pipeline.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::Kernel;

/// One `(dim, birth, death)` triple of a persistence diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    /// The class never dies in the filtration; `death` is a finite stand-in.
    pub essential: bool,
}

impl DiagramPoint {
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        DiagramPoint {
            dim,
            birth,
            death,
            essential: false,
        }
    }

    #[inline]
    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }

    /// Midpoint `(b + d) / 2` of the rotated diagram.
    #[inline]
    pub fn center(&self) -> f64 {
        0.5 * (self.birth + self.death)
    }

    /// Half-lifetime `(d - b) / 2` of the rotated diagram.
    #[inline]
    pub fn half_life(&self) -> f64 {
        0.5 * (self.death - self.birth)
    }

    fn validate(&self) -> Result<()> {
        if !self.birth.is_finite() || !self.death.is_finite() {
            return Err(Error::InvalidValue(format!(
                "non-finite diagram point ({}, {})",
                self.birth, self.death
            )));
        }
        if self.death < self.birth {
            return Err(Error::InvalidValue(format!(
                "diagram point dies before it is born ({}, {})",
                self.birth, self.death
            )));
        }
        Ok(())
    }
}

/// How raw filtration levels were mapped to canonical `(birth, death)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Values are used as they are (a sublevel filtration).
    SublevelCanonical,
    /// Superlevel levels stored negated so that death >= birth.
    SuperlevelNegated,
}

impl Orientation {
    /// Raw filtration level of a canonical coordinate.
    pub fn raw_level(self, value: f64) -> f64 {
        match self {
            Orientation::SublevelCanonical => value,
            Orientation::SuperlevelNegated => -value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub points: Vec<DiagramPoint>,
    pub orientation: Orientation,
    pub source: String,
}

impl PersistenceDiagram {
    /// Builds a diagram after checking every point.
    pub fn new(points: Vec<DiagramPoint>, orientation: Orientation) -> Result<Self> {
        for p in &points {
            p.validate()?;
        }
        Ok(PersistenceDiagram {
            points,
            orientation,
            source: String::new(),
        })
    }

    pub fn empty(orientation: Orientation) -> Self {
        PersistenceDiagram {
            points: Vec::new(),
            orientation,
            source: String::new(),
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points of the given homology dimension, in input order.
    pub fn filter_by_dim(&self, dim: usize) -> PersistenceDiagram {
        PersistenceDiagram {
            points: self.points.iter().copied().filter(|p| p.dim == dim).collect(),
            orientation: self.orientation,
            source: self.source.clone(),
        }
    }

    pub fn count_dim(&self, dim: usize) -> usize {
        self.points.iter().filter(|p| p.dim == dim).count()
    }

    /// Largest half-lifetime among points of `dim`, zero when there are none.
    pub fn max_half_life(&self, dim: usize) -> f64 {
        self.points
            .iter()
            .filter(|p| p.dim == dim)
            .map(DiagramPoint::half_life)
            .fold(0.0, f64::max)
    }

    /// Sum of lifetimes of points of `dim`.
    pub fn total_persistence(&self, dim: usize) -> f64 {
        self.points
            .iter()
            .filter(|p| p.dim == dim)
            .map(DiagramPoint::lifetime)
            .sum()
    }
}

/// Maps superlevel `(dim, birth_level, death_level)` pairs to canonical
/// coordinates by negation, so that every stored point has `death >= birth`.
pub fn canonicalize_superlevel(raw_pairs: &[(usize, f64, f64)]) -> Result<PersistenceDiagram> {
    let mut points = Vec::with_capacity(raw_pairs.len());
    for (index, &(dim, birth, death)) in raw_pairs.iter().enumerate() {
        if !birth.is_finite() || !death.is_finite() {
            return Err(Error::InvalidValue(format!(
                "raw pair {index} has a non-finite level"
            )));
        }
        if birth < death {
            return Err(Error::RawPairInverted {
                index,
                birth,
                death,
            });
        }
        points.push(DiagramPoint::new(dim, -birth, -death));
    }
    Ok(PersistenceDiagram {
        points,
        orientation: Orientation::SuperlevelNegated,
        source: String::new(),
    })
}

/// Free function form of [`PersistenceDiagram::filter_by_dim`].
pub fn filter_by_dim(diagram: &PersistenceDiagram, dim: usize) -> PersistenceDiagram {
    diagram.filter_by_dim(dim)
}

/// Physical bounding box `(x0, y0)`-`(x1, y1)`; x runs along columns, y along rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extent {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Extent {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Extent { x0, y0, x1, y1 }
    }

    pub fn unit() -> Self {
        Extent::new(0.0, 0.0, 1.0, 1.0)
    }
}

/// A 2D grid of finite values stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    pub extent: Extent,
}

impl ScalarField {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>, extent: Extent) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyField);
        }
        if rows * cols != values.len() {
            return Err(Error::InvalidValue(format!(
                "{rows}x{cols} field needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!("non-finite field value at index {i}")));
        }
        Ok(ScalarField {
            rows,
            cols,
            values,
            extent,
        })
    }

    /// Field over the unit box.
    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(rows, cols, values, Extent::unit())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                values.push(f(i, j));
            }
        }
        Self::from_values(rows, cols, values)
    }

    pub fn constant(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::from_values(rows, cols, vec![value; rows * cols])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Physical coordinates `(x, y)` of the center of pixel `(row, col)`.
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        let e = self.extent;
        let center = |a: f64, b: f64, i: usize, n: usize| {
            let (n, u) = (n as f64, i as f64 + 0.5);
            ((n - u) * a + u * b) / n
        };
        (center(e.x0, e.x1, col, self.cols), center(e.y0, e.y1, row, self.rows))
    }
}

/// `n` points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidValue("point dimension must be positive".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidValue(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidValue("non-finite coordinate".into()));
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn from_xy(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(2, points.iter().flat_map(|&(x, y)| [x, y]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Uniform grid `t_i = t0 + i (t1 - t0) / (m - 1)`, `i = 0..m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    t0: f64,
    t1: f64,
    m: usize,
}

impl Grid1D {
    pub fn new(t0: f64, t1: f64, m: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || t0 >= t1 {
            return Err(Error::InvalidValue(format!("grid needs t0 < t1, got [{t0}, {t1}]")));
        }
        if m < 2 {
            return Err(Error::InvalidValue(format!("grid needs at least 2 samples, got {m}")));
        }
        Ok(Grid1D { t0, t1, m })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / (self.m - 1) as f64
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        if i + 1 == self.m {
            self.t1
        } else {
            self.t0 + i as f64 * (self.t1 - self.t0) / (self.m - 1) as f64
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(move |i| self.at(i))
    }

    /// Trapezoid-rule weights for integrating over the grid.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.step();
        let mut w = vec![h; self.m];
        w[0] = 0.5 * h;
        w[self.m - 1] = 0.5 * h;
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SummaryKind {
    Landscape,
    GeneralizedLandscape,
    Silhouette,
    Apf,
}

impl SummaryKind {
    pub fn name(self) -> &'static str {
        match self {
            SummaryKind::Landscape => "landscape",
            SummaryKind::GeneralizedLandscape => "glandscape",
            SummaryKind::Silhouette => "silhouette",
            SummaryKind::Apf => "apf",
        }
    }
}

impl fmt::Display for SummaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SummaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "landscape" => Ok(SummaryKind::Landscape),
            "glandscape" | "generalized-landscape" => Ok(SummaryKind::GeneralizedLandscape),
            "silhouette" => Ok(SummaryKind::Silhouette),
            "apf" => Ok(SummaryKind::Apf),
            other => Err(Error::InvalidValue(format!("unknown summary kind '{other}'"))),
        }
    }
}

/// Parameters a summary was computed with; unused ones stay `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurveParams {
    pub dim: Option<usize>,
    pub kernel: Option<Kernel>,
    pub bandwidth: Option<f64>,
    pub weight_power: Option<f64>,
}

/// A functional summary sampled on a shared grid, one row per order.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCurve {
    pub grid: Grid1D,
    pub orders: Vec<Vec<f64>>,
    pub kind: SummaryKind,
    pub params: CurveParams,
}

impl SummaryCurve {
    pub fn new(grid: Grid1D, orders: Vec<Vec<f64>>, kind: SummaryKind) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidValue("curve needs at least one order".into()));
        }
        for row in &orders {
            if row.len() != grid.len() {
                return Err(Error::InvalidValue(format!(
                    "order has {} samples, grid has {}",
                    row.len(),
                    grid.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidValue("non-finite curve value".into()));
            }
        }
        Ok(SummaryCurve {
            grid,
            orders,
            kind,
            params: CurveParams::default(),
        })
    }

    /// Single-order curve from a closure over the grid.
    pub fn from_fn(grid: Grid1D, kind: SummaryKind, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, vec![grid.points().map(f).collect()], kind)
    }

    pub fn with_params(mut self, params: CurveParams) -> Self {
        self.params = params;
        self
    }

    pub fn order_count(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self, k: usize) -> &[f64] {
        &self.orders[k]
    }

    /// Keeps orders `1..=k` (or all of them if there are fewer).
    pub fn truncate_orders(&self, k: usize) -> SummaryCurve {
        let mut c = self.clone();
        c.orders.truncate(k.max(1));
        c
    }

    /// Same grid, kind and order count.
    pub fn compatible(&self, other: &SummaryCurve) -> bool {
        self.grid == other.grid && self.kind == other.kind && self.orders.len() == other.orders.len()
    }

    pub fn max_value(&self) -> f64 {
        self.orders
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Checks that every curve shares the first curve's grid, kind and order count.
pub fn check_compatible<'a>(curves: impl IntoIterator<Item = &'a SummaryCurve>) -> Result<()> {
    let mut iter = curves.into_iter();
    let Some(first) = iter.next() else {
        return Err(Error::EmptyInput);
    };
    if iter.all(|c| c.compatible(first)) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Weight function `omega(t)` of a curve metric.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricWeight {
    Unit,
    /// Pointwise standard deviations, one row per order like the curves.
    Sigma(SummaryCurve),
}

/// `d_{p, omega}`: `p` finite gives the weighted `L_p` distance, infinite the
/// weighted supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub p: f64,
    pub weight: MetricWeight,
}

impl MetricSpec {
    pub fn lp(p: f64) -> Self {
        MetricSpec {
            p,
            weight: MetricWeight::Unit,
        }
    }

    pub fn sup() -> Self {
        Self::lp(f64::INFINITY)
    }

    pub fn weighted(p: f64, sigma: SummaryCurve) -> Self {
        MetricSpec {
            p,
            weight: MetricWeight::Sigma(sigma),
        }
    }

    pub fn is_sup(&self) -> bool {
        self.p == f64::INFINITY
    }

    pub fn describe(&self) -> String {
        let p = if self.is_sup() {
            "inf".to_string()
        } else {
            self.p.to_string()
        };
        let w = match self.weight {
            MetricWeight::Unit => "unit",
            MetricWeight::Sigma(_) => "sigma",
        };
        format!("p={p},weight={w}")
    }
}
