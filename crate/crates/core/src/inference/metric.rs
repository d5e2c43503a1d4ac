use crate::error::{Error, Result};
use crate::types::{MetricSpec, MetricWeight, SummaryCurve};

/// Grid points with `sigma < SIGMA_FLOOR * max sigma` are left out of
/// sigma-weighted metrics.
pub const SIGMA_FLOOR: f64 = 1e-12;

/// Mask of usable weights, or `DegenerateSigma` if none are.
pub(crate) fn sigma_mask(sigma: &SummaryCurve) -> Result<Vec<Vec<bool>>> {
    let max = sigma.max_value();
    if !(max > 0.0) {
        return Err(Error::DegenerateSigma);
    }
    let eps = SIGMA_FLOOR * max;
    Ok(sigma
        .orders
        .iter()
        .map(|row| row.iter().map(|&s| s >= eps).collect())
        .collect())
}

/// `d_{p, omega}(f, g)`. Orders of multi-order curves are concatenated into
/// one function; finite `p` integrates each with the trapezoid rule.
pub fn metric_distance(f: &SummaryCurve, g: &SummaryCurve, spec: &MetricSpec) -> Result<f64> {
    if !f.compatible(g) {
        return Err(Error::GridMismatch);
    }
    let p = spec.p;
    if !(p > 0.0) {
        return Err(Error::BadP(p));
    }
    let weight = match &spec.weight {
        MetricWeight::Unit => None,
        MetricWeight::Sigma(s) => {
            if s.grid != f.grid || s.order_count() != f.order_count() {
                return Err(Error::GridMismatch);
            }
            Some((s, sigma_mask(s)?))
        }
    };
    let term = |k: usize, i: usize| -> Option<f64> {
        let diff = (f.orders[k][i] - g.orders[k][i]).abs();
        match &weight {
            None => Some(diff),
            Some((s, mask)) => mask[k][i].then(|| diff / s.orders[k][i]),
        }
    };
    let m = f.grid.len();
    let k_max = f.order_count();
    if spec.is_sup() {
        let mut best = 0.0f64;
        for k in 0..k_max {
            for i in 0..m {
                if let Some(v) = term(k, i) {
                    best = best.max(v);
                }
            }
        }
        return Ok(best);
    }
    let w = f.grid.trapezoid_weights();
    let mut total = 0.0;
    for k in 0..k_max {
        for (i, wi) in w.iter().enumerate() {
            if let Some(v) = term(k, i) {
                total += wi * v.powf(p);
            }
        }
    }
    Ok(total.powf(1.0 / p))
}
