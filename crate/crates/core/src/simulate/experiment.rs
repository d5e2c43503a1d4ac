use super::gland::{gland, GlandConfig};
use super::stix::{stix, StixConfig};
use crate::error::{Error, Result};
use crate::homology::superlevel_diagram;
use crate::inference::{permutation_test_with, stats, PValueRule};
use crate::kernel::Kernel;
use crate::learn::{distance_matrix, knn_from_distances, loocv_select_k_from_matrix};
use crate::par;
use crate::rng::child_seed;
use crate::smoothing::{kde, loess_smooth, KdeSpec, LoessSpec};
use crate::summaries::{default_grid, SummarySpec};
use crate::types::{Extent, Grid1D, MetricSpec, PersistenceDiagram, SummaryCurve};

/// Summary of a diagram, with an all-zero curve standing in for a silhouette
/// of a diagram that has no off-diagonal points.
fn summarize(spec: &SummarySpec, d: &PersistenceDiagram, dim: usize, grid: Grid1D) -> Result<SummaryCurve> {
    match spec.apply(d, dim, grid) {
        Err(Error::EmptySilhouette) => {
            let empty = PersistenceDiagram::empty(d.orientation);
            let mut c = SummarySpec::Landscape { k_max: 1 }.apply(&empty, dim, grid)?;
            c.kind = crate::types::SummaryKind::Silhouette;
            if let SummarySpec::Silhouette { p } = spec {
                c.params.weight_power = Some(*p);
            }
            Ok(c)
        }
        other => other,
    }
}

/// Two-sample STIX power study: `reps` repetitions of "draw two groups of
/// images, smooth, summarize, permutation-test".
#[derive(Debug, Clone, PartialEq)]
pub struct StixExperiment {
    pub null_df: f64,
    pub alt_df: f64,
    pub images_per_group: usize,
    pub reps: usize,
    pub b: usize,
    pub summaries: Vec<SummarySpec>,
    pub dim: usize,
    /// Image settings; its seed and thickness are set per image.
    pub image: StixConfig,
    pub loess: LoessSpec,
    pub metric: MetricSpec,
    pub grid_size: usize,
    pub rule: PValueRule,
    pub seed: u64,
}

impl Default for StixExperiment {
    fn default() -> Self {
        StixExperiment {
            null_df: 5.0,
            alt_df: 5.0,
            images_per_group: 8,
            reps: 20,
            b: 200,
            summaries: vec![
                SummarySpec::Landscape { k_max: 3 },
                SummarySpec::GeneralizedLandscape {
                    kernel: Kernel::Triangle,
                    h: 0.01,
                    k_max: 3,
                },
            ],
            dim: 1,
            image: StixConfig::default(),
            loess: LoessSpec::default(),
            metric: MetricSpec::lp(2.0),
            grid_size: crate::summaries::DEFAULT_GRID_SIZE,
            rule: PValueRule::Proportion,
            seed: 0,
        }
    }
}

impl StixExperiment {
    pub fn validate(&self) -> Result<()> {
        if self.images_per_group == 0 || self.reps == 0 || self.b == 0 {
            return Err(Error::BadConfig("images_per_group, reps and B must be at least 1".into()));
        }
        if self.summaries.is_empty() {
            return Err(Error::BadConfig("no summaries requested".into()));
        }
        if self.dim > 1 {
            return Err(Error::BadMaxDim(self.dim));
        }
        for df in [self.null_df, self.alt_df] {
            StixConfig {
                thickness_df: df,
                ..self.image
            }
            .validate()?;
        }
        Ok(())
    }

    /// Shared grid over the negated intensity range, padded by 5%.
    pub fn grid(&self) -> Result<Grid1D> {
        let (fg, bg) = (self.image.foreground, self.image.background);
        let pad = 0.05 * (fg - bg);
        Grid1D::new(-fg - pad, -bg + pad, self.grid_size)
    }

    /// Column names: `<summary>_j<j>` tests orders `1..=j`.
    pub fn columns(&self) -> Vec<String> {
        self.summaries
            .iter()
            .flat_map(|s| (1..=s.k_max()).map(move |j| format!("{s}_j{j}")))
            .collect()
    }
}

/// p-values, one row per repetition and one column per (summary, orders) test.
#[derive(Debug, Clone, PartialEq)]
pub struct StixTable {
    pub columns: Vec<String>,
    pub p_values: Vec<Vec<f64>>,
}

impl StixTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|n| n == name)?;
        Some(self.p_values.iter().map(|r| r[c]).collect())
    }

    pub fn median(&self, name: &str) -> Option<f64> {
        self.column(name).map(|v| stats::median(&v))
    }
}

/// Runs the STIX experiment. Repetition `r` derives every seed it uses from
/// `child_seed(seed, r)`, so the table does not depend on scheduling.
pub fn stix_experiment(cfg: &StixExperiment) -> Result<StixTable> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let columns = cfg.columns();
    let rows = par::try_map_range(cfg.reps, |r| -> Result<Vec<f64>> {
        let rep_seed = child_seed(cfg.seed, r as u64);
        let image_seed = child_seed(rep_seed, 0);
        let test_seed = child_seed(rep_seed, 1);
        let n = cfg.images_per_group;
        // curves[spec][image], null group first
        let per_image = (0..2 * n)
            .map(|idx| {
                let df = if idx < n { cfg.null_df } else { cfg.alt_df };
                let img = stix(&StixConfig {
                    thickness_df: df,
                    seed: child_seed(image_seed, idx as u64),
                    ..cfg.image
                })?;
                let smooth = loess_smooth(&img, &cfg.loess)?;
                let d = superlevel_diagram(&smooth, cfg.dim)?;
                cfg.summaries
                    .iter()
                    .map(|s| summarize(s, &d, cfg.dim, grid))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut row = Vec::with_capacity(columns.len());
        for (si, spec) in cfg.summaries.iter().enumerate() {
            for j in 1..=spec.k_max() {
                let curves: Vec<SummaryCurve> = per_image.iter().map(|c| c[si].truncate_orders(j)).collect();
                let (a, b) = curves.split_at(n);
                let t = permutation_test_with(a, b, &cfg.metric, cfg.b, child_seed(test_seed, row.len() as u64), cfg.rule)?;
                row.push(t.p_value);
            }
        }
        Ok(row)
    })?;
    Ok(StixTable { columns, p_values: rows })
}

/// Irregularity of the four gland types A-D.
pub const GLAND_TYPES: [f64; 4] = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];

/// kNN classification of simulated glands of types A-D.
#[derive(Debug, Clone, PartialEq)]
pub struct GlandExperiment {
    pub train_per_type: usize,
    pub test_per_type: usize,
    /// Generator settings; its irregularity and seed are set per gland.
    pub gland: GlandConfig,
    pub kde_kernel: Kernel,
    pub kde_h: f64,
    pub kde_size: usize,
    /// Candidate summaries; leave-one-out error picks one (first on ties).
    pub summaries: Vec<SummarySpec>,
    pub dim: usize,
    pub k_candidates: Vec<usize>,
    pub metric: MetricSpec,
    pub grid_size: usize,
    pub seed: u64,
}

impl Default for GlandExperiment {
    fn default() -> Self {
        GlandExperiment {
            train_per_type: 50,
            test_per_type: 10,
            gland: GlandConfig::default(),
            kde_kernel: Kernel::TruncatedGaussian,
            kde_h: 0.05,
            kde_size: 64,
            summaries: vec![SummarySpec::Silhouette { p: 1.0 }],
            dim: 1,
            k_candidates: vec![1, 3, 5, 7, 9, 11, 13, 15],
            metric: MetricSpec::lp(2.0),
            grid_size: crate::summaries::DEFAULT_GRID_SIZE,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlandReport {
    /// Chosen summary (display form).
    pub summary: String,
    pub k: usize,
    pub loocv_error: f64,
    /// `confusion[actual][predicted]` over the test set.
    pub confusion: Vec<Vec<usize>>,
    pub accuracy: f64,
    /// Type A vs type D classifier trained on those two types only.
    pub ad_k: usize,
    pub ad_accuracy: f64,
}

impl GlandReport {
    /// Share of misclassifications between adjacent types (1 when there are none).
    pub fn adjacent_error_share(&self) -> f64 {
        let (mut adj, mut all) = (0, 0);
        for (i, row) in self.confusion.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if i != j {
                    all += c;
                    if i.abs_diff(j) == 1 {
                        adj += c;
                    }
                }
            }
        }
        if all == 0 {
            1.0
        } else {
            adj as f64 / all as f64
        }
    }
}

fn gland_diagrams(cfg: &GlandExperiment, split: u64, per_type: usize) -> Result<(Vec<PersistenceDiagram>, Vec<usize>)> {
    let pad = 3.0 * cfg.kde_h;
    let spec = KdeSpec {
        kernel: cfg.kde_kernel,
        h: cfg.kde_h,
        rows: cfg.kde_size,
        cols: cfg.kde_size,
        extent: Extent::new(-pad, -pad, 1.0 + pad, 1.0 + pad),
    };
    let split_seed = child_seed(cfg.seed, split);
    let n = GLAND_TYPES.len() * per_type;
    let diagrams = par::try_map_range(n, |idx| {
        let cloud = gland(&GlandConfig {
            irregularity: GLAND_TYPES[idx / per_type],
            seed: child_seed(split_seed, idx as u64),
            ..cfg.gland
        })?;
        superlevel_diagram(&kde(&cloud, &spec)?, cfg.dim)
    })?;
    Ok((diagrams, (0..n).map(|i| i / per_type).collect()))
}

/// Generates training and test glands, picks the summary and `k` by
/// leave-one-out on the training set, and classifies the test set.
pub fn gland_experiment(cfg: &GlandExperiment) -> Result<GlandReport> {
    if cfg.train_per_type < 2 || cfg.test_per_type == 0 {
        return Err(Error::BadConfig("need at least 2 training and 1 test gland per type".into()));
    }
    if cfg.summaries.is_empty() || cfg.k_candidates.is_empty() {
        return Err(Error::BadConfig("summaries and k candidates must be non-empty".into()));
    }
    cfg.gland.validate()?;
    let (train_d, train_y) = gland_diagrams(cfg, 0, cfg.train_per_type)?;
    let (test_d, test_y) = gland_diagrams(cfg, 1, cfg.test_per_type)?;
    let grid = {
        let g = default_grid(&train_d, cfg.dim);
        Grid1D::new(g.t0(), g.t1(), cfg.grid_size)?
    };

    let mut best: Option<(usize, usize, f64)> = None;
    let mut curves = Vec::with_capacity(cfg.summaries.len());
    for (si, spec) in cfg.summaries.iter().enumerate() {
        let train: Vec<SummaryCurve> =
            train_d.iter().map(|d| summarize(spec, d, cfg.dim, grid)).collect::<Result<_>>()?;
        let test: Vec<SummaryCurve> =
            test_d.iter().map(|d| summarize(spec, d, cfg.dim, grid)).collect::<Result<_>>()?;
        let dm = distance_matrix(&train, &cfg.metric)?;
        let (k, err) = loocv_select_k_from_matrix(&dm, &train_y, &cfg.k_candidates)?;
        if best.is_none_or(|(_, _, e)| err < e) {
            best = Some((si, k, err));
        }
        curves.push((train, test, dm));
    }
    let (si, k, loocv_error) = best.expect("at least one summary");
    let (train, test, dm) = &curves[si];

    let mut confusion = vec![vec![0usize; GLAND_TYPES.len()]; GLAND_TYPES.len()];
    let query_dists = |q: &SummaryCurve, pool: &[usize]| -> Result<Vec<f64>> {
        pool.iter().map(|&j| crate::inference::metric_distance(q, &train[j], &cfg.metric)).collect()
    };
    let everyone: Vec<usize> = (0..train.len()).collect();
    for (q, &y) in test.iter().zip(&test_y) {
        let pred = knn_from_distances(&query_dists(q, &everyone)?, &train_y, k)?;
        confusion[y][pred] += 1;
    }
    let correct: usize = (0..GLAND_TYPES.len()).map(|i| confusion[i][i]).sum();

    // binary A-vs-D classifier on the extreme types only
    let last = GLAND_TYPES.len() - 1;
    let ad: Vec<usize> = everyone.iter().copied().filter(|&j| train_y[j] == 0 || train_y[j] == last).collect();
    let ad_y: Vec<usize> = ad.iter().map(|&j| usize::from(train_y[j] == last)).collect();
    let ad_dm = crate::learn::DistanceMatrix::from_rows(
        ad.iter().map(|&i| ad.iter().map(|&j| dm.get(i, j)).collect()).collect(),
    )?;
    let ad_candidates: Vec<usize> = cfg.k_candidates.iter().copied().filter(|&c| c < ad.len()).collect();
    let (ad_k, _) = loocv_select_k_from_matrix(&ad_dm, &ad_y, &ad_candidates)?;
    let (mut ad_hits, mut ad_total) = (0, 0);
    for (q, &y) in test.iter().zip(&test_y) {
        if y != 0 && y != last {
            continue;
        }
        let pred = knn_from_distances(&query_dists(q, &ad)?, &ad_y, ad_k)?;
        ad_total += 1;
        ad_hits += usize::from(pred == usize::from(y == last));
    }

    Ok(GlandReport {
        summary: cfg.summaries[si].to_string(),
        k,
        loocv_error,
        confusion,
        accuracy: correct as f64 / test.len() as f64,
        ad_k,
        ad_accuracy: ad_hits as f64 / ad_total as f64,
    })
}
