use rand::seq::SliceRandom;

use super::bands::mean_of;
use super::metric::metric_distance;
use crate::error::{Error, Result};
use crate::par;
use crate::rng;
use crate::types::{check_compatible, MetricSpec, SummaryCurve};

/// How exceedance counts become a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PValueRule {
    /// `#{T* >= T} / B`; can be zero.
    #[default]
    Proportion,
    /// `(#{T* >= T} + 1) / (B + 1)`.
    AddOne,
}

/// Outcome of a two-sample permutation test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Relabelings drawn, or enumerated in exhaustive mode.
    pub b: usize,
    /// Relabelings with `T* >= T`.
    pub exceedances: usize,
    pub metric: MetricSpec,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub rule: PValueRule,
}

/// Both groups pooled in a canonical (lexicographic by value) order, so the
/// test depends only on the two multisets of curves, not on how they were
/// listed.
struct Pooled<'a> {
    curves: Vec<&'a SummaryCurve>,
    in_a: Vec<bool>,
    owned: Vec<SummaryCurve>,
    n: usize,
}

fn lex_cmp(x: &SummaryCurve, y: &SummaryCurve) -> std::cmp::Ordering {
    x.orders
        .iter()
        .flatten()
        .zip(y.orders.iter().flatten())
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

impl<'a> Pooled<'a> {
    fn new(a: &'a [SummaryCurve], b: &'a [SummaryCurve]) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptyGroup);
        }
        check_compatible(a.iter().chain(b))?;
        let mut tagged: Vec<(&SummaryCurve, bool)> =
            a.iter().map(|c| (c, true)).chain(b.iter().map(|c| (c, false))).collect();
        tagged.sort_by(|x, y| lex_cmp(x.0, y.0));
        Ok(Pooled {
            owned: vec![a[0].clone()],
            curves: tagged.iter().map(|t| t.0).collect(),
            in_a: tagged.iter().map(|t| t.1).collect(),
            n: a.len(),
        })
    }

    /// `d(mean(A), mean(B))` with both groups' members summed in pooled
    /// index order, so the original split reproduces `T` bit for bit.
    fn statistic(&self, in_a: &[bool], metric: &MetricSpec) -> Result<f64> {
        let pick = |want: bool| {
            self.curves
                .iter()
                .zip(in_a)
                .filter(move |(_, &f)| f == want)
                .map(|(c, _)| *c)
        };
        let ma = mean_of(&self.owned, pick(true));
        let mb = mean_of(&self.owned, pick(false));
        metric_distance(&ma, &mb, metric)
    }

    fn original(&self) -> Vec<bool> {
        self.in_a.clone()
    }
}

fn finish(count: usize, b: usize, rule: PValueRule) -> f64 {
    match rule {
        PValueRule::Proportion => count as f64 / b as f64,
        PValueRule::AddOne => (count + 1) as f64 / (b + 1) as f64,
    }
}

/// Permutation test with `p = #{T* >= T} / B` over `b` uniform relabelings.
pub fn permutation_test(
    group_a: &[SummaryCurve],
    group_b: &[SummaryCurve],
    metric: &MetricSpec,
    b: usize,
    seed: u64,
) -> Result<TestResult> {
    permutation_test_with(group_a, group_b, metric, b, seed, PValueRule::Proportion)
}

/// [`permutation_test`] with an explicit p-value rule. Relabeling `j` is a
/// uniform shuffle drawn from RNG stream `(seed, j)`.
pub fn permutation_test_with(
    group_a: &[SummaryCurve],
    group_b: &[SummaryCurve],
    metric: &MetricSpec,
    b: usize,
    seed: u64,
    rule: PValueRule,
) -> Result<TestResult> {
    let pooled = Pooled::new(group_a, group_b)?;
    if b == 0 {
        return Err(Error::InvalidValue("permutation test needs at least one relabeling".into()));
    }
    let t = pooled.statistic(&pooled.original(), metric)?;
    let total = pooled.curves.len();
    let n = pooled.n;
    let hits: Vec<bool> = par::try_map_range(b, |j| {
        let mut r = rng::stream(seed, j as u64);
        let mut idx: Vec<usize> = (0..total).collect();
        idx.shuffle(&mut r);
        let mut in_a = vec![false; total];
        for &i in &idx[..n] {
            in_a[i] = true;
        }
        Ok::<bool, Error>(pooled.statistic(&in_a, metric)? >= t)
    })?;
    let count = hits.iter().filter(|&&h| h).count();
    Ok(TestResult {
        statistic: t,
        p_value: finish(count, b, rule),
        b,
        exceedances: count,
        metric: metric.clone(),
        seed,
        n,
        m: total - n,
        rule,
    })
}

fn combinations(total: usize, n: usize) -> Vec<Vec<bool>> {
    fn rec(start: usize, left: usize, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=cur.len() - left {
            cur[i] = true;
            rec(i + 1, left - 1, cur, out);
            cur[i] = false;
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut vec![false; total], &mut out);
    out
}

/// Largest pooled size accepted by [`exhaustive_permutation_test`].
pub const MAX_EXHAUSTIVE: usize = 20;

/// Exact permutation p-value over all `C(n + m, n)` relabelings.
pub fn exhaustive_permutation_test(
    group_a: &[SummaryCurve],
    group_b: &[SummaryCurve],
    metric: &MetricSpec,
) -> Result<TestResult> {
    let pooled = Pooled::new(group_a, group_b)?;
    let total = pooled.curves.len();
    if total > MAX_EXHAUSTIVE {
        return Err(Error::InvalidValue(format!(
            "exhaustive enumeration is limited to {MAX_EXHAUSTIVE} curves, got {total}"
        )));
    }
    let t = pooled.statistic(&pooled.original(), metric)?;
    let splits = combinations(total, pooled.n);
    let hits: Vec<bool> = par::try_map_range(splits.len(), |j| Ok::<bool, Error>(pooled.statistic(&splits[j], metric)? >= t))?;
    let count = hits.iter().filter(|&&h| h).count();
    Ok(TestResult {
        statistic: t,
        p_value: finish(count, splits.len(), PValueRule::Proportion),
        b: splits.len(),
        exceedances: count,
        metric: metric.clone(),
        seed: 0,
        n: pooled.n,
        m: total - pooled.n,
        rule: PValueRule::Proportion,
    })
}
