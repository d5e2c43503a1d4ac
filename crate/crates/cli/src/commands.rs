use std::fs;
use std::path::{Path, PathBuf};

use tdasum::homology::{superlevel_diagram, tile_field};
use tdasum::inference::{
    bootstrap_band, exhaustive_permutation_test, permutation_test_with, prediction_band, sd_curve, PValueRule,
    WidthMode,
};
use tdasum::learn::{
    classical_mds, distance_matrix, knn_classify, loocv_select_k, DistanceMatrix, LabeledCurveSet,
};
use tdasum::simulate::{
    gland, gland_experiment, stix, stix_experiment, GlandConfig, Raster, StixConfig, GLAND_TYPES,
};
use tdasum::smoothing::{kde, loess_smooth, KdeSpec, LoessSpec};
use tdasum::summaries::{
    apf, default_grid, generalized_landscape, intensity, landscape, silhouette, SummarySpec,
};
use tdasum::{io, rng, Grid1D, MetricSpec, PersistenceDiagram, SummaryCurve, SummaryKind};

use crate::cli::*;
use crate::config::{parse_experiment, Experiment};
use crate::error::{CliError, CliResult};
use crate::output::{unique_stems, Outcome};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Reads and parses `path`, recording it as an input of the run.
fn load<T>(out: &mut Outcome, path: &Path, parse: impl FnOnce(&[u8]) -> tdasum::Result<T>) -> CliResult<T> {
    let bytes = read_bytes(path)?;
    out.input(path);
    parse(&bytes).map_err(|e| CliError::at(path, e))
}

fn load_curves(out: &mut Outcome, paths: &[PathBuf], kind: Option<SummaryKind>) -> CliResult<Vec<SummaryCurve>> {
    let curves: Vec<SummaryCurve> = paths
        .iter()
        .map(|p| load(out, p, |b| io::read_curve(b, kind)))
        .collect::<CliResult<_>>()?;
    if let Some(i) = curves.iter().position(|c| !c.compatible(&curves[0])) {
        return Err(CliError::Data(format!(
            "{}: grid, kind or order count differs from {}",
            paths[i].display(),
            paths[0].display()
        )));
    }
    Ok(curves)
}

fn encode(f: impl FnOnce(&mut Vec<u8>) -> tdasum::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

fn curve_bytes(c: &SummaryCurve) -> Vec<u8> {
    encode(|b| io::write_curve(b, c))
}

fn metric(args: &MetricArgs, pool: &[SummaryCurve]) -> CliResult<MetricSpec> {
    if !(args.p > 0.0) {
        return Err(usage(format!("--metric-p must be positive, got {}", args.p)));
    }
    Ok(match args.weight {
        WeightArg::Unit => MetricSpec::lp(args.p),
        WeightArg::Sigma => MetricSpec::weighted(args.p, sd_curve(pool)?),
    })
}

fn fmt_f(v: f64) -> String {
    v.to_string()
}

pub fn execute(cmd: &Command) -> CliResult<Outcome> {
    match cmd {
        Command::Diagram(a) => diagram(a),
        Command::Summarize(a) => summarize(a),
        Command::Test(a) => test(a),
        Command::Band(a) => band(a),
        Command::Predict(a) => predict(a),
        Command::Classify(a) => classify(a),
        Command::Mds(a) => mds(a),
        Command::SimulateStix(a) => simulate_stix(a),
        Command::SimulateGland(a) => simulate_gland(a),
        Command::Experiment(a) => experiment(a),
    }
}

fn parse_tiles(s: &str) -> CliResult<(usize, usize)> {
    let bad = || usage(format!("--tiles expects ROWSxCOLS, got '{s}'"));
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

fn diagram(a: &DiagramArgs) -> CliResult<Outcome> {
    if a.max_dim > 1 {
        return Err(usage(format!("--max-dim must be 0 or 1, got {}", a.max_dim)));
    }
    let tiles = a.tiles.as_deref().map(parse_tiles).transpose()?;
    let mut out = Outcome::new(None);
    let mut field = match (&a.field, &a.cloud) {
        (Some(p), _) => {
            if a.kde_h.is_some() {
                return Err(usage("--kde-h applies to --cloud inputs only"));
            }
            load(&mut out, p, |b| io::read_field(b))?
        }
        (None, Some(p)) => {
            let h = a.kde_h.ok_or_else(|| usage("--cloud needs --kde-h"))?;
            let cloud = load(&mut out, p, |b| io::read_cloud(b))?;
            let spec = KdeSpec::padded(&cloud, a.kde_kernel, h, a.kde_size, a.kde_size)?;
            kde(&cloud, &spec)?
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    if a.smooth {
        field = loess_smooth(&field, &LoessSpec { neighbor_fraction: a.loess_frac })?;
    }
    match tiles {
        None => {
            let d = superlevel_diagram(&field, a.max_dim)?;
            out.file("diagram.csv", encode(|b| io::write_diagram(b, &d)));
        }
        Some((tr, tc)) => {
            let tiling = tile_field(&field, tr, tc)?;
            for (i, tile) in tiling.tiles.iter().enumerate() {
                let d = superlevel_diagram(tile, a.max_dim)?;
                out.file(format!("tile_{}_{}.csv", i / tc, i % tc), encode(|b| io::write_diagram(b, &d)));
            }
        }
    }
    Ok(out)
}

fn summarize(a: &SummarizeArgs) -> CliResult<Outcome> {
    let mut out = Outcome::new(None);
    let diagrams: Vec<PersistenceDiagram> =
        a.diagrams.iter().map(|p| load(&mut out, p, |b| io::read_diagram(b))).collect::<CliResult<_>>()?;
    if a.m < 2 {
        return Err(usage("--m must be at least 2"));
    }
    let grid = match (a.t0, a.t1) {
        (Some(t0), Some(t1)) => Grid1D::new(t0, t1, a.m).map_err(|e| usage(format!("--t0/--t1: {e}")))?,
        _ => {
            let g = default_grid(&diagrams, a.dim);
            Grid1D::new(g.t0(), g.t1(), a.m)?
        }
    };
    let need_h = || {
        a.h.ok_or_else(|| usage(format!("--kind {} needs --h", format!("{:?}", a.kind).to_lowercase())))
    };
    for ((d, path), name) in diagrams.iter().zip(&a.diagrams).zip(unique_stems(&a.diagrams)) {
        let at = |e| CliError::at(path, e);
        let bytes = match a.kind {
            KindArg::Landscape => curve_bytes(&landscape(d, a.dim, a.k, grid).map_err(at)?),
            KindArg::Glandscape => {
                curve_bytes(&generalized_landscape(d, a.dim, a.kernel, need_h()?, a.k, grid).map_err(at)?)
            }
            KindArg::Silhouette => curve_bytes(&silhouette(d, a.dim, a.p, grid).map_err(at)?),
            KindArg::Apf => curve_bytes(&apf(d, a.dim, grid).map_err(at)?),
            KindArg::Intensity => {
                let s = intensity(&d.filter_by_dim(a.dim), a.kernel, need_h()?, a.p, grid, grid).map_err(at)?;
                encode(|b| io::write_surface(b, &s))
            }
        };
        out.file(format!("{name}.csv"), bytes);
    }
    Ok(out)
}

fn test(a: &TestArgs) -> CliResult<Outcome> {
    if a.exhaustive && a.add_one {
        return Err(usage("--add-one applies to sampled tests, not --exhaustive"));
    }
    let mut out = Outcome::new(a.seed.filter(|_| !a.exhaustive));
    let ga = load_curves(&mut out, &a.group_a, a.curves.kind)?;
    let gb = load_curves(&mut out, &a.group_b, a.curves.kind)?;
    if !ga[0].compatible(&gb[0]) {
        return Err(CliError::Data("--group-a and --group-b curves have different grids, kinds or orders".into()));
    }
    let pool: Vec<SummaryCurve> = ga.iter().chain(&gb).cloned().collect();
    let m = metric(&a.metric, &pool)?;
    let r = if a.exhaustive {
        exhaustive_permutation_test(&ga, &gb, &m)?
    } else {
        let rule = if a.add_one { PValueRule::AddOne } else { PValueRule::Proportion };
        permutation_test_with(&ga, &gb, &m, a.b, a.seed.expect("clap requires --seed"), rule)?
    };
    out.text(
        "test.txt",
        &[
            ("statistic", fmt_f(r.statistic)),
            ("p_value", fmt_f(r.p_value)),
            ("relabelings", r.b.to_string()),
            ("exceedances", r.exceedances.to_string()),
            ("mode", if a.exhaustive { "exhaustive" } else { "sampled" }.into()),
            ("rule", if a.add_one { "add-one" } else { "proportion" }.into()),
            ("n_a", r.n.to_string()),
            ("n_b", r.m.to_string()),
            ("metric", r.metric.describe()),
            ("seed", out.seed.map_or("none".into(), |s| s.to_string())),
        ],
    );
    Ok(out)
}

fn band(a: &BandArgs) -> CliResult<Outcome> {
    let mut out = Outcome::new(Some(a.seed));
    let curves = load_curves(&mut out, &a.curves, a.input.kind)?;
    let mode = match a.mode {
        ModeArg::Fixed => WidthMode::Fixed,
        ModeArg::Variable => WidthMode::Variable,
    };
    let r = bootstrap_band(&curves, a.alpha, a.b, mode, a.seed)?;
    out.file("center.csv", curve_bytes(&r.center));
    out.file("lower.csv", curve_bytes(&r.lower));
    out.file("upper.csv", curve_bytes(&r.upper));
    if let Some(s) = &r.sigma {
        out.file("sigma.csv", curve_bytes(s));
    }
    out.text(
        "band.txt",
        &[
            ("alpha", fmt_f(r.alpha)),
            ("mode", r.mode.to_string()),
            ("half_width", fmt_f(r.half_width)),
            ("B", r.b.to_string()),
            ("n", curves.len().to_string()),
            ("seed", r.seed.to_string()),
        ],
    );
    Ok(out)
}

fn predict(a: &PredictArgs) -> CliResult<Outcome> {
    let mut out = Outcome::new(None);
    let curves = load_curves(&mut out, &a.curves, a.input.kind)?;
    let m = metric(&a.metric, &curves)?;
    let pred = prediction_band(&curves, a.gamma, &m)?;
    out.file("center.csv", curve_bytes(&pred.center));
    if let Some((lo, hi)) = &pred.envelope {
        out.file("lower.csv", curve_bytes(lo));
        out.file("upper.csv", curve_bytes(hi));
    }
    let mut res = String::from("id,residual\n");
    for (i, e) in pred.residuals.iter().enumerate() {
        res += &format!("{i},{e}\n");
    }
    out.file("residuals.csv", res.into_bytes());
    if !a.query.is_empty() {
        let queries = load_curves(&mut out, &a.query, a.input.kind)?;
        let mut q = String::from("id,file,residual,inside\n");
        for (i, (c, p)) in queries.iter().zip(&a.query).enumerate() {
            let d = tdasum::inference::metric_distance(c, &pred.center, &pred.metric).map_err(|e| CliError::at(p, e))?;
            q += &format!("{i},{},{d},{}\n", crate::output::stem(p), u8::from(d <= pred.q_hat));
        }
        out.file("queries.csv", q.into_bytes());
    }
    out.text(
        "prediction.txt",
        &[
            ("gamma", fmt_f(pred.gamma)),
            ("q_hat", fmt_f(pred.q_hat)),
            ("training_coverage", fmt_f(pred.training_coverage())),
            ("n", curves.len().to_string()),
            ("metric", pred.metric.describe()),
        ],
    );
    Ok(out)
}

fn classify(a: &ClassifyArgs) -> CliResult<Outcome> {
    let mut out = Outcome::new(None);
    let train = load_curves(&mut out, &a.train, a.input.kind)?;
    let labels = load(&mut out, &a.labels, |b| io::read_labels(b))?;
    if labels.len() != train.len() {
        return Err(CliError::Data(format!(
            "{}: {} labels for {} training curves",
            a.labels.display(),
            labels.len(),
            train.len()
        )));
    }
    let queries = load_curves(&mut out, &a.query, a.input.kind)?;
    if !queries[0].compatible(&train[0]) {
        return Err(CliError::Data("--query curves do not match the --train grid, kind or orders".into()));
    }
    let m = metric(&a.metric, &train)?;
    let set = LabeledCurveSet::new(train, labels)?;
    let (k, loocv) = match a.k {
        Some(k) => (k, None),
        None => {
            let (k, e) = loocv_select_k(&set, &a.k_candidates, &m)?;
            (k, Some(e))
        }
    };
    let preds: Vec<usize> = queries
        .iter()
        .zip(&a.query)
        .map(|(q, p)| knn_classify(&set, q, k, &m).map_err(|e| CliError::at(p, e)))
        .collect::<CliResult<_>>()?;
    let mut csv = String::from("id,file,label\n");
    for (i, (l, p)) in preds.iter().zip(&a.query).enumerate() {
        csv += &format!("{i},{},{l}\n", crate::output::stem(p));
    }
    out.file("predictions.csv", csv.into_bytes());
    let mut kv = vec![("k", k.to_string()), ("metric", m.describe()), ("n_train", set.len().to_string())];
    if let Some(e) = loocv {
        kv.push(("loocv_error", fmt_f(e)));
        kv.push((
            "k_candidates",
            a.k_candidates.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        ));
    }
    out.text("classify.txt", &kv);
    Ok(out)
}

fn mds(a: &MdsArgs) -> CliResult<Outcome> {
    let mut out = Outcome::new(None);
    let dm = match &a.matrix {
        Some(p) => {
            let rows = load(&mut out, p, |b| io::read_matrix(b))?;
            DistanceMatrix::from_rows(rows).map_err(|e| CliError::at(p, e))?
        }
        None => {
            let curves = load_curves(&mut out, &a.curves, a.input.kind)?;
            let dm = distance_matrix(&curves, &metric(&a.metric, &curves)?)?;
            out.file("distances.csv", encode(|b| io::write_matrix(b, dm.rows())));
            dm
        }
    };
    let coords = classical_mds(&dm, a.dim)?;
    out.file("embedding.csv", encode(|b| io::write_embedding(b, &coords)));
    Ok(out)
}

fn simulate_stix(a: &StixArgs) -> CliResult<Outcome> {
    let mut out = Outcome::new(Some(a.seed));
    let base = StixConfig {
        n_sticks: a.n_sticks,
        thickness_df: a.df,
        rows: a.rows,
        cols: a.cols,
        foreground: a.foreground,
        background: a.background,
        raster: if a.anti_alias { Raster::AntiAliased } else { Raster::Hard },
        seed: a.seed,
    };
    base.validate().map_err(|e| usage(e.to_string()))?;
    let fields = tdasum::par::try_map_range(a.count, |i| {
        stix(&StixConfig {
            seed: rng::child_seed(a.seed, i as u64),
            ..base
        })
    })?;
    for (i, f) in fields.iter().enumerate() {
        out.file(format!("stix_{i:04}.txt"), encode(|b| io::write_field(b, f)));
    }
    Ok(out)
}

fn simulate_gland(a: &GlandArgs) -> CliResult<Outcome> {
    let mut out = Outcome::new(Some(a.seed));
    let base = GlandConfig {
        n_points: a.n_points,
        radius: a.radius,
        irregularity: a.irregularity,
        jitter: a.jitter,
        seed: a.seed,
    };
    base.validate().map_err(|e| usage(e.to_string()))?;
    let clouds = tdasum::par::try_map_range(a.count, |i| {
        gland(&GlandConfig {
            seed: rng::child_seed(a.seed, i as u64),
            ..base
        })
    })?;
    for (i, c) in clouds.iter().enumerate() {
        out.file(format!("gland_{i:04}.csv"), encode(|b| io::write_cloud(b, c)));
    }
    Ok(out)
}

const TYPE_NAMES: [&str; 4] = ["A", "B", "C", "D"];

fn experiment(a: &ExperimentArgs) -> CliResult<Outcome> {
    let text = read_bytes(&a.config)?;
    let text = String::from_utf8(text).map_err(|_| CliError::Data(format!("{}: not UTF-8", a.config.display())))?;
    let summaries: Option<&[SummarySpec]> = (!a.summaries.is_empty()).then_some(&a.summaries[..]);
    let exp = parse_experiment(&text, a.seed, summaries)
        .map_err(|e| CliError::Data(format!("{}: {e}", a.config.display())))?;
    let mut out = Outcome::new(None);
    out.input(&a.config);
    match exp {
        Experiment::Stix(cfg) => {
            out.seed = Some(cfg.seed);
            let table = stix_experiment(&cfg)?;
            let mut csv = format!("rep,{}\n", table.columns.join(","));
            for (r, row) in table.p_values.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                csv += &format!("{r},{}\n", cells.join(","));
            }
            out.file("p_values.csv", csv.into_bytes());
            let mut kv: Vec<(&str, String)> = vec![
                ("kind", "stix".into()),
                ("null_df", fmt_f(cfg.null_df)),
                ("alt_df", fmt_f(cfg.alt_df)),
                ("reps", cfg.reps.to_string()),
                ("B", cfg.b.to_string()),
                ("seed", cfg.seed.to_string()),
            ];
            let medians: Vec<(String, String)> = table
                .columns
                .iter()
                .map(|c| (format!("median_{c}"), fmt_f(table.median(c).expect("column exists"))))
                .collect();
            kv.extend(medians.iter().map(|(k, v)| (k.as_str(), v.clone())));
            out.text("report.txt", &kv);
        }
        Experiment::Gland(cfg) => {
            out.seed = Some(cfg.seed);
            let rep = gland_experiment(&cfg)?;
            let mut csv = format!("actual,{}\n", TYPE_NAMES.join(","));
            for (name, row) in TYPE_NAMES.iter().zip(&rep.confusion) {
                let cells: Vec<String> = row.iter().map(usize::to_string).collect();
                csv += &format!("{name},{}\n", cells.join(","));
            }
            out.file("confusion.csv", csv.into_bytes());
            debug_assert_eq!(rep.confusion.len(), GLAND_TYPES.len());
            out.text(
                "report.txt",
                &[
                    ("kind", "gland".into()),
                    ("summary", rep.summary.clone()),
                    ("k", rep.k.to_string()),
                    ("loocv_error", fmt_f(rep.loocv_error)),
                    ("accuracy", fmt_f(rep.accuracy)),
                    ("adjacent_error_share", fmt_f(rep.adjacent_error_share())),
                    ("ad_k", rep.ad_k.to_string()),
                    ("ad_accuracy", fmt_f(rep.ad_accuracy)),
                    ("train_per_type", cfg.train_per_type.to_string()),
                    ("test_per_type", cfg.test_per_type.to_string()),
                    ("seed", cfg.seed.to_string()),
                ],
            );
        }
    }
    Ok(out)
}
