use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::metric::{metric_distance, sigma_mask};
use super::stats::order_statistic_index;
use crate::error::{Error, Result};
use crate::par;
use crate::rng;
use crate::types::{check_compatible, MetricSpec, MetricWeight, SummaryCurve};

/// Pointwise mean of compatible curves, per order.
pub fn mean_curve(curves: &[SummaryCurve]) -> Result<SummaryCurve> {
    check_compatible(curves)?;
    Ok(mean_of(curves, curves.iter()))
}

/// Mean of `members` (all compatible with `template`), summed in iteration order.
pub(crate) fn mean_of<'a>(template: &[SummaryCurve], members: impl Iterator<Item = &'a SummaryCurve>) -> SummaryCurve {
    let first = &template[0];
    let mut sum: Vec<Vec<f64>> = first.orders.iter().map(|r| vec![0.0; r.len()]).collect();
    let mut n = 0usize;
    for c in members {
        for (s, r) in sum.iter_mut().zip(&c.orders) {
            for (a, b) in s.iter_mut().zip(r) {
                *a += b;
            }
        }
        n += 1;
    }
    let inv = 1.0 / n as f64;
    for s in sum.iter_mut().flatten() {
        *s *= inv;
    }
    SummaryCurve {
        grid: first.grid,
        orders: sum,
        kind: first.kind,
        params: first.params,
    }
}

/// Pointwise variance with divisor `n`.
pub fn variance_curve(curves: &[SummaryCurve]) -> Result<SummaryCurve> {
    let mean = mean_curve(curves)?;
    let mut var = mean.clone();
    for (k, row) in var.orders.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().enumerate() {
            let mu = mean.orders[k][i];
            *v = curves.iter().map(|c| (c.orders[k][i] - mu).powi(2)).sum::<f64>() / curves.len() as f64;
        }
    }
    Ok(var)
}

/// Pointwise standard deviation `sqrt(variance_curve)`.
pub fn sd_curve(curves: &[SummaryCurve]) -> Result<SummaryCurve> {
    let mut v = variance_curve(curves)?;
    for x in v.orders.iter_mut().flatten() {
        *x = x.sqrt();
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthMode {
    /// Constant half-width `t_{1-alpha}`.
    Fixed,
    /// Half-width `s_{1-alpha} sigma(t)`, studentized by the pointwise sd.
    Variable,
}

impl WidthMode {
    pub fn name(self) -> &'static str {
        match self {
            WidthMode::Fixed => "fixed",
            WidthMode::Variable => "variable",
        }
    }
}

impl fmt::Display for WidthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WidthMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(WidthMode::Fixed),
            "variable" => Ok(WidthMode::Variable),
            other => Err(Error::InvalidValue(format!("unknown band mode '{other}'"))),
        }
    }
}

/// A `1 - alpha` bootstrap confidence band for the mean summary.
#[derive(Debug, Clone, PartialEq)]
pub struct BandResult {
    pub center: SummaryCurve,
    pub lower: SummaryCurve,
    pub upper: SummaryCurve,
    pub alpha: f64,
    pub mode: WidthMode,
    pub half_width: f64,
    pub sigma: Option<SummaryCurve>,
    pub b: usize,
    pub seed: u64,
}

impl BandResult {
    /// Whether `curve` lies inside the band at every grid point.
    pub fn contains(&self, curve: &SummaryCurve) -> bool {
        curve.compatible(&self.center)
            && curve
                .orders
                .iter()
                .flatten()
                .zip(self.lower.orders.iter().flatten().zip(self.upper.orders.iter().flatten()))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }
}

fn envelope(center: &SummaryCurve, width: impl Fn(usize, usize) -> f64) -> (SummaryCurve, SummaryCurve) {
    let mut lower = center.clone();
    let mut upper = center.clone();
    for k in 0..center.order_count() {
        for i in 0..center.grid.len() {
            let w = width(k, i);
            lower.orders[k][i] -= w;
            upper.orders[k][i] += w;
        }
    }
    (lower, upper)
}

/// Bootstrap band from `b` resamples of the curves with replacement.
///
/// Replicate `j` draws from RNG stream `(seed, j)`.
pub fn bootstrap_band(curves: &[SummaryCurve], alpha: f64, b: usize, mode: WidthMode, seed: u64) -> Result<BandResult> {
    let n = curves.len();
    if n < 2 {
        return Err(Error::TooFewCurves { needed: 2, got: n });
    }
    check_compatible(curves)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidValue(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if b == 0 {
        return Err(Error::InvalidValue("bootstrap needs at least one replicate".into()));
    }
    let center = mean_curve(curves)?;
    let sigma = match mode {
        WidthMode::Fixed => None,
        WidthMode::Variable => Some(sd_curve(curves)?),
    };
    let spec = match &sigma {
        None => MetricSpec::sup(),
        Some(s) => MetricSpec::weighted(f64::INFINITY, s.clone()),
    };
    let stats: Vec<f64> = par::try_map_range(b, |j| {
        let mut r = rng::stream(seed, j as u64);
        let picks: Vec<usize> = (0..n).map(|_| r.random_range(0..n)).collect();
        let boot = mean_of(curves, picks.iter().map(|&i| &curves[i]));
        metric_distance(&boot, &center, &spec)
    })?;
    let mut sorted = stats;
    sorted.sort_unstable_by(f64::total_cmp);
    let half_width = sorted[order_statistic_index(1.0 - alpha, b)];

    let (lower, upper) = match &sigma {
        None => envelope(&center, |_, _| half_width),
        Some(s) => {
            let mask = sigma_mask(s)?;
            envelope(&center, |k, i| if mask[k][i] { half_width * s.orders[k][i] } else { 0.0 })
        }
    };
    Ok(BandResult {
        center,
        lower,
        upper,
        alpha,
        mode,
        half_width,
        sigma,
        b,
        seed,
    })
}

/// A `gamma` prediction set for a new summary: curves within `q_hat` of the
/// mean under `metric`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub center: SummaryCurve,
    pub q_hat: f64,
    pub gamma: f64,
    pub metric: MetricSpec,
    pub residuals: Vec<f64>,
    /// Pointwise envelope, present for the sigma-weighted supremum metric.
    pub envelope: Option<(SummaryCurve, SummaryCurve)>,
}

impl Prediction {
    pub fn contains(&self, curve: &SummaryCurve) -> Result<bool> {
        Ok(metric_distance(curve, &self.center, &self.metric)? <= self.q_hat)
    }

    /// Fraction of residuals at most `q_hat`.
    pub fn training_coverage(&self) -> f64 {
        self.residuals.iter().filter(|&&e| e <= self.q_hat).count() as f64 / self.residuals.len() as f64
    }
}

/// Residual-quantile prediction set: `q_hat` is the `ceil(gamma n)`-th
/// smallest of `e_i = d(F_i, mean)`.
pub fn prediction_band(curves: &[SummaryCurve], gamma: f64, metric: &MetricSpec) -> Result<Prediction> {
    let n = curves.len();
    if n < 2 {
        return Err(Error::TooFewCurves { needed: 2, got: n });
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidValue(format!("gamma must be in (0, 1), got {gamma}")));
    }
    let center = mean_curve(curves)?;
    let residuals = curves
        .iter()
        .map(|c| metric_distance(c, &center, metric))
        .collect::<Result<Vec<f64>>>()?;
    let mut sorted = residuals.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let q_hat = sorted[order_statistic_index(gamma, n)];
    let envelope = match (&metric.weight, metric.is_sup()) {
        (MetricWeight::Sigma(s), true) => {
            let mask = sigma_mask(s)?;
            Some(envelope(&center, |k, i| if mask[k][i] { q_hat * s.orders[k][i] } else { 0.0 }))
        }
        _ => None,
    };
    Ok(Prediction {
        center,
        q_hat,
        gamma,
        metric: metric.clone(),
        residuals,
        envelope,
    })
}
