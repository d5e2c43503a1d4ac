//! kNN classification of summaries, leave-one-out choice of `k`, pairwise
//! distance matrices and classical multidimensional scaling.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::inference::metric_distance;
use crate::par;
use crate::types::{check_compatible, MetricSpec, SummaryCurve};

/// Curves with class labels `0, 1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCurveSet {
    pub curves: Vec<SummaryCurve>,
    pub labels: Vec<usize>,
}

impl LabeledCurveSet {
    pub fn new(curves: Vec<SummaryCurve>, labels: Vec<usize>) -> Result<Self> {
        if curves.len() != labels.len() {
            return Err(Error::InvalidValue(format!(
                "{} curves but {} labels",
                curves.len(),
                labels.len()
            )));
        }
        check_compatible(&curves)?;
        Ok(LabeledCurveSet { curves, labels })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    rows: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    /// Validates squareness, a zero diagonal, non-negativity and symmetry to 1e-12.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidValue(format!("row {i} has {} entries, expected {n}", r.len())));
            }
            if r[i] != 0.0 {
                return Err(Error::InvalidValue(format!("diagonal entry {i} is {}", r[i])));
            }
            for (j, &v) in r.iter().enumerate() {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidValue(format!("entry ({i}, {j}) = {v} is not a distance")));
                }
                let scale = v.abs().max(rows[j][i].abs()).max(1.0);
                if (v - rows[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidValue(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(DistanceMatrix { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// `M[i][j] = d(curve_i, curve_j)`, each unordered pair computed once.
pub fn distance_matrix(curves: &[SummaryCurve], metric: &MetricSpec) -> Result<DistanceMatrix> {
    check_compatible(curves)?;
    let n = curves.len();
    let upper: Vec<Vec<f64>> = par::try_map_range(n, |i| {
        (i + 1..n)
            .map(|j| metric_distance(&curves[i], &curves[j], metric))
            .collect::<Result<Vec<f64>>>()
    })?;
    let mut rows = vec![vec![0.0; n]; n];
    for (i, r) in upper.iter().enumerate() {
        for (off, &d) in r.iter().enumerate() {
            let j = i + 1 + off;
            rows[i][j] = d;
            rows[j][i] = d;
        }
    }
    Ok(DistanceMatrix { rows })
}

/// Plurality vote of the `k` nearest, neighbours ordered by `(distance, index)`
/// and vote ties going to the lowest label. For labels in `{0, 1}` this is the
/// rule "1 iff more than k/2 neighbours are 1".
fn vote(mut neighbors: Vec<(f64, usize)>, labels: &[usize], k: usize) -> usize {
    neighbors.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let top = labels.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; top + 1];
    for &(_, j) in neighbors.iter().take(k) {
        counts[labels[j]] += 1;
    }
    // first maximum, i.e. the lowest label among ties
    let best = counts.iter().copied().max().unwrap_or(0);
    counts.iter().position(|&c| c == best).unwrap_or(0)
}

/// Label of `query` by `k`-nearest-neighbour vote over `train`.
pub fn knn_classify(train: &LabeledCurveSet, query: &SummaryCurve, k: usize, metric: &MetricSpec) -> Result<usize> {
    let n = train.len();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    if !query.compatible(&train.curves[0]) {
        return Err(Error::GridMismatch);
    }
    let neighbors = train
        .curves
        .iter()
        .enumerate()
        .map(|(j, c)| Ok((metric_distance(query, c, metric)?, j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(vote(neighbors, &train.labels, k))
}

/// kNN vote from precomputed distances of one query to every training point.
pub fn knn_from_distances(distances: &[f64], labels: &[usize], k: usize) -> Result<usize> {
    let n = labels.len();
    if k == 0 || k > n || distances.len() != n {
        return Err(Error::BadK { k, n });
    }
    Ok(vote(distances.iter().copied().zip(0..).collect(), labels, k))
}

/// Leave-one-out choice of `k`: the candidate with the fewest errors, the
/// smallest on ties, with its error rate.
pub fn loocv_select_k(train: &LabeledCurveSet, candidates: &[usize], metric: &MetricSpec) -> Result<(usize, f64)> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let dm = distance_matrix(&train.curves, metric)?;
    loocv_select_k_from_matrix(&dm, &train.labels, candidates)
}

/// [`loocv_select_k`] on a precomputed training distance matrix.
pub fn loocv_select_k_from_matrix(dm: &DistanceMatrix, labels: &[usize], candidates: &[usize]) -> Result<(usize, f64)> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let n = dm.len();
    if labels.len() != n {
        return Err(Error::InvalidValue(format!("{n} curves but {} labels", labels.len())));
    }
    if let Some(&k) = candidates.iter().find(|&&k| k == 0 || k + 1 > n) {
        return Err(Error::BadK { k, n: n.saturating_sub(1) });
    }
    let wrong: Vec<Vec<bool>> = par::map_range(n, |i| {
        let others: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (dm.get(i, j), j)).collect();
        candidates
            .iter()
            .map(|&k| vote(others.clone(), labels, k) != labels[i])
            .collect()
    });
    let mut best: Option<(usize, usize)> = None;
    for (c, &k) in candidates.iter().enumerate() {
        let errors = wrong.iter().filter(|w| w[c]).count();
        best = match best {
            Some((bk, be)) if be < errors || (be == errors && bk < k) => Some((bk, be)),
            _ => Some((k, errors)),
        };
    }
    let (k, errors) = best.expect("candidates are non-empty");
    Ok((k, errors as f64 / n as f64))
}

/// Classical MDS: top `out_dim` eigenpairs of `-J D^2 J / 2`, coordinates
/// scaled by the square roots of the (clamped non-negative) eigenvalues.
/// Each axis is signed so that its largest-magnitude coordinate is positive.
pub fn classical_mds(dm: &DistanceMatrix, out_dim: usize) -> Result<Vec<Vec<f64>>> {
    let n = dm.len();
    if out_dim == 0 || out_dim > n {
        return Err(Error::BadDim { out_dim, n });
    }
    let d2 = DMatrix::from_fn(n, n, |i, j| dm.get(i, j).powi(2));
    let row_mean: Vec<f64> = (0..n).map(|i| d2.row(i).sum() / n as f64).collect();
    let total = row_mean.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (d2[(i, j)] - row_mean[i] - row_mean[j] + total));
    let eig = SymmetricEigen::new(b);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| {
        let (la, lc) = (eig.eigenvalues[a], eig.eigenvalues[c]);
        lc.total_cmp(&la).then(lc.abs().total_cmp(&la.abs())).then(a.cmp(&c))
    });
    let mut coords = vec![vec![0.0; out_dim]; n];
    for (axis, &e) in order.iter().take(out_dim).enumerate() {
        let scale = eig.eigenvalues[e].max(0.0).sqrt();
        let v = eig.eigenvectors.column(e);
        let pivot = (0..n).fold(0, |best, i| if v[i].abs() > v[best].abs() { i } else { best });
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for (i, c) in coords.iter_mut().enumerate() {
            c[axis] = sign * scale * v[i];
        }
    }
    Ok(coords)
}
