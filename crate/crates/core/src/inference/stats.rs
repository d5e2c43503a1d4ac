//! Small order-statistic helpers shared by the inference procedures and the
//! experiment drivers.

/// Index (0-based) of the order statistic `x_(ceil(q n))`, clamped to `[0, n-1]`.
///
/// A relative slack of `1e-9` keeps products like `0.9 * 200` from rounding up
/// past an integer.
pub fn order_statistic_index(q: f64, n: usize) -> usize {
    assert!(n > 0, "order statistic of an empty sample");
    let r = (q * n as f64 * (1.0 - 1e-12) - 1e-9).ceil();
    (r.max(1.0) as usize).min(n) - 1
}

/// Smallest sample value whose empirical CDF is at least `q`.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v[order_statistic_index(q, v.len())]
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Kolmogorov-Smirnov distance between the sample's empirical CDF and the
/// uniform distribution on `[0, 1]`.
pub fn ks_uniform(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            ((i as f64 + 1.0) / n - x).max(x - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Critical value of the one-sample KS statistic at level `alpha`
/// (Stephens' finite-sample approximation).
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    let s = (n as f64).sqrt();
    c / (s + 0.12 + 0.11 / s)
}
