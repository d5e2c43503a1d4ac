//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Run with `cargo test -p tdasum-cli --test acceptance`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;
use tdasum::homology::{alive_at_level, betti_at_level, superlevel_diagram};
use tdasum::inference::{
    bootstrap_band, exhaustive_permutation_test, permutation_test, prediction_band, stats, WidthMode,
};
use tdasum::learn::{classical_mds, DistanceMatrix};
use tdasum::simulate::{gland_experiment, stix_experiment, GlandExperiment, StixExperiment};
use tdasum::summaries::{apf, generalized_landscape, landscape, silhouette};
use tdasum::{rng, DiagramPoint, Grid1D, Kernel, MetricSpec, Orientation, PersistenceDiagram, ScalarField};
use tdasum::{SummaryCurve, SummaryKind};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Suite {
    failed: usize,
    total: usize,
}

impl Suite {
    fn run(&mut self, id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let pass = o.pass && took <= budget;
        self.total += 1;
        if !pass {
            self.failed += 1;
        }
        let tag = if pass { "PASS" } else { "FAIL" };
        let over = if took > budget { " over budget" } else { "" };
        println!("[{tag}] {id:>2}. {name}: {} ({:.1}s of {}s{over})", o.detail, took.as_secs_f64(), budget.as_secs());
    }
}

// ---------------------------------------------------------------- oracles

fn oracle_kernel(kernel: Kernel, u: f64) -> f64 {
    let a = u.abs();
    if a > 1.0 {
        return 0.0;
    }
    match kernel {
        Kernel::Triangle => 1.0 - a,
        Kernel::Epanechnikov => 1.0 - a * a,
        Kernel::Tricube => (1.0 - a * a * a).powi(3),
        Kernel::TruncatedGaussian => (-8.0 * a * a).exp(),
    }
}

fn tents(points: &[(f64, f64)], t: f64) -> Vec<f64> {
    points.iter().map(|&(b, d)| (t - b).min(d - t).max(0.0)).collect()
}

/// k-th largest (1-based) of `v`, zero when there are fewer than k values.
fn kth_largest(v: &[f64], k: usize) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s.get(k - 1).copied().unwrap_or(0.0)
}

fn random_diagram(r: &mut impl Rng) -> (Vec<(f64, f64)>, PersistenceDiagram) {
    let n = r.random_range(0..=10);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let (x, y) = (r.random_range(0.0..5.0), r.random_range(0.0..5.0));
            (f64::min(x, y), f64::max(x, y))
        })
        .collect();
    let d = PersistenceDiagram::new(
        pts.iter().map(|&(b, d)| DiagramPoint::new(1, b, d)).collect(),
        Orientation::SublevelCanonical,
    )
    .unwrap();
    (pts, d)
}

fn summary_oracle() -> Outcome {
    let grid = Grid1D::new(-0.25, 5.25, 111).unwrap();
    let ts: Vec<f64> = grid.points().collect();
    let mut worst = 0.0f64;
    let mut mismatches = Vec::new();
    let mut r = rng::stream(2024, 1);
    for case in 0..1000 {
        let (pts, d) = random_diagram(&mut r);

        let l = landscape(&d, 1, 4, grid).unwrap();
        let a = apf(&d, 1, grid).unwrap();
        for (i, &t) in ts.iter().enumerate() {
            let tv = tents(&pts, t);
            for k in 1..=4 {
                if l.orders[k - 1][i] != kth_largest(&tv, k) {
                    mismatches.push(format!("landscape case {case}"));
                }
            }
            let acc = pts
                .iter()
                .filter(|&&(b, dd)| b + dd <= 2.0 * t)
                .fold(0.0, |s, &(b, dd)| s + (dd - b));
            if a.orders[0][i] != acc {
                mismatches.push(format!("apf case {case}"));
            }
        }

        for kernel in Kernel::ALL {
            for h in [0.05, 0.25, 1.0] {
                let g = generalized_landscape(&d, 1, kernel, h, 3, grid).unwrap();
                for (i, &t) in ts.iter().enumerate() {
                    let bumps: Vec<f64> = pts
                        .iter()
                        .map(|&(b, dd)| 0.5 * (dd - b) * oracle_kernel(kernel, (t - 0.5 * (b + dd)) / h))
                        .collect();
                    for k in 1..=3 {
                        worst = worst.max((g.orders[k - 1][i] - kth_largest(&bumps, k)).abs());
                    }
                }
            }
        }

        for p in [0.5, 1.0, 2.0] {
            match silhouette(&d, 1, p, grid) {
                Ok(s) => {
                    let w: Vec<f64> = pts.iter().map(|&(b, dd)| (dd - b).powf(p)).collect();
                    let total: f64 = w.iter().sum();
                    for (i, &t) in ts.iter().enumerate() {
                        let num: f64 = tents(&pts, t).iter().zip(&w).map(|(x, w)| x * w).sum();
                        worst = worst.max((s.orders[0][i] - num / total).abs());
                    }
                }
                Err(_) if pts.is_empty() => {}
                Err(e) => mismatches.push(format!("silhouette case {case}: {e}")),
            }
        }
    }
    mismatches.dedup();
    let pass = mismatches.is_empty() && worst <= 1e-12;
    let first = mismatches.first().map(|m| format!(", first mismatch {m}")).unwrap_or_default();
    outcome(
        pass,
        format!("1000 diagrams; exact mismatches {}{first}; max weighted error {worst:.1e}", mismatches.len()),
    )
}

fn homology_oracle() -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0;
    for seed in 0..500u64 {
        let mut r = rng::stream(seed, 7);
        let f = ScalarField::from_fn(6, 6, |_, _| r.random_range(0..3) as f64).unwrap();
        let d = superlevel_diagram(&f, 1).unwrap();
        let mut levels: Vec<f64> = f.values().to_vec();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        for &level in &levels {
            let (b0, b1) = betti_at_level(&f, level).unwrap();
            let got = (alive_at_level(&d, 0, level), alive_at_level(&d, 1, level));
            checks += 1;
            if got != (b0, b1) {
                bad.push(format!("seed {seed} level {level}: diagram {got:?}, oracle {:?}", (b0, b1)));
            }
        }
    }
    let first = bad.first().map(|m| format!("; first: {m}")).unwrap_or_default();
    outcome(bad.is_empty(), format!("{checks} (field, level) checks, {} mismatches{first}", bad.len()))
}

fn bootstrap_coverage() -> Outcome {
    let g = Grid1D::new(0.0, 1.0, 64).unwrap();
    let mu = |t: f64| (PI * t).sin();
    let truth = SummaryCurve::from_fn(g, SummaryKind::Silhouette, mu).unwrap();
    let trials = 200u64;
    let mut hits = [0usize; 2];
    for trial in 0..trials {
        let mut r = rng::stream(1000, trial);
        let curves: Vec<SummaryCurve> = (0..20)
            .map(|_| {
                let a: f64 = r.sample(StandardNormal);
                let b: f64 = r.sample(StandardNormal);
                let c: f64 = r.sample(StandardNormal);
                SummaryCurve::from_fn(g, SummaryKind::Silhouette, |t| {
                    mu(t) + 0.5 * a * (2.0 * PI * t).sin() + 0.3 * b * t + 0.2 * c * (3.0 * t).cos()
                })
                .unwrap()
            })
            .collect();
        for (slot, mode) in [WidthMode::Fixed, WidthMode::Variable].into_iter().enumerate() {
            if bootstrap_band(&curves, 0.1, 200, mode, trial).unwrap().contains(&truth) {
                hits[slot] += 1;
            }
        }
    }
    let fixed = hits[0] as f64 / trials as f64;
    let variable = hits[1] as f64 / trials as f64;
    outcome(
        (0.85..=0.95).contains(&fixed),
        format!("fixed-width coverage {fixed:.3} (target [0.85, 0.95]); variable-width {variable:.3} (reported only)"),
    )
}

fn prediction_coverage() -> Outcome {
    let g = Grid1D::new(0.0, 1.0, 32).unwrap();
    let mut worst = f64::INFINITY;
    let mut fails = 0;
    for set in 0..50u64 {
        let mut r = rng::stream(77, set);
        let n = r.random_range(5..40);
        let curves: Vec<SummaryCurve> = (0..n)
            .map(|_| {
                let a: f64 = r.sample(StandardNormal);
                let s: f64 = r.random_range(0.5..2.0);
                SummaryCurve::from_fn(g, SummaryKind::Landscape, |t| s * (a * t).sin() + a).unwrap()
            })
            .collect();
        for gamma in [0.5, 0.8, 0.9] {
            for metric in [MetricSpec::lp(2.0), MetricSpec::sup()] {
                let p = prediction_band(&curves, gamma, &metric).unwrap();
                let cov = p.training_coverage();
                worst = worst.min(cov - gamma);
                if cov < gamma {
                    fails += 1;
                }
            }
        }
    }
    outcome(fails == 0, format!("300 (set, gamma, metric) cases, {fails} below gamma; min coverage - gamma {worst:.3}"))
}

fn stix_null() -> Outcome {
    let cfg = StixExperiment {
        null_df: 5.0,
        alt_df: 5.0,
        seed: 1,
        ..Default::default()
    };
    let table = stix_experiment(&cfg).unwrap();
    let crit = stats::ks_critical(cfg.reps, 0.01);
    let mut pass = true;
    let mut parts = Vec::new();
    for col in ["landscape_j1", "glandscape_triangle_h0.01_j1"] {
        let p = table.column(col).unwrap();
        let (med, ks) = (stats::median(&p), stats::ks_uniform(&p));
        pass &= (0.25..=0.75).contains(&med) && ks < crit;
        parts.push(format!("{col} median {med:.3} KS {ks:.3}"));
    }
    outcome(pass, format!("{}; KS 1% critical {crit:.3}", parts.join(", ")))
}

fn stix_power() -> Outcome {
    let cfg = StixExperiment {
        null_df: 5.0,
        alt_df: 7.0,
        seed: 1,
        ..Default::default()
    };
    let table = stix_experiment(&cfg).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for col in ["landscape_j1", "glandscape_triangle_h0.01_j1"] {
        let med = table.median(col).unwrap();
        pass &= med <= 0.05;
        parts.push(format!("{col} median {med:.3}"));
    }
    outcome(pass, format!("{} (target <= 0.05)", parts.join(", ")))
}

fn small_permutation() -> Outcome {
    let g = Grid1D::new(0.0, 1.0, 8).unwrap();
    let c = |v: f64| SummaryCurve::from_fn(g, SummaryKind::Landscape, |_| v).unwrap();
    let (a, b) = (vec![c(0.0), c(0.0)], vec![c(10.0), c(10.0)]);
    let ex = exhaustive_permutation_test(&a, &b, &MetricSpec::sup()).unwrap();
    let sampled = permutation_test(&a, &b, &MetricSpec::sup(), 100_000, 5).unwrap();
    let exact = ex.exceedances == 2 && ex.b == 6 && ex.p_value == 2.0 / 6.0 && ex.statistic == 10.0;
    let close = (sampled.p_value - 2.0 / 6.0).abs() <= 0.01;
    outcome(
        exact && close,
        format!(
            "exhaustive {}/{} = {:.6}; sampled B=100000 p = {:.5} (|diff| {:.5})",
            ex.exceedances,
            ex.b,
            ex.p_value,
            sampled.p_value,
            (sampled.p_value - 2.0 / 6.0).abs()
        ),
    )
}

fn gland_classification() -> Outcome {
    let mut accs = Vec::new();
    let mut ads = Vec::new();
    let mut adjacent = 0;
    let mut shares = Vec::new();
    for seed in 0..10 {
        let rep = gland_experiment(&GlandExperiment {
            seed,
            ..Default::default()
        })
        .unwrap();
        accs.push(rep.accuracy);
        ads.push(rep.ad_accuracy);
        let share = rep.adjacent_error_share();
        shares.push(format!("{share:.2}"));
        if share >= 0.5 {
            adjacent += 1;
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (acc, ad) = (mean(&accs), mean(&ads));
    let min_acc = accs.iter().copied().fold(1.0, f64::min);
    let pass = ad >= 0.95 && acc >= 0.55 && adjacent >= 8;
    outcome(
        pass,
        format!(
            "4-class accuracy mean {acc:.3} (min {min_acc:.3}, need >= 0.55); A-vs-D mean {ad:.3}; \
             adjacent-error majority in {adjacent}/10 seeds [{}]",
            shares.join(" ")
        ),
    )
}

fn mds_fidelity() -> Outcome {
    let mut worst = 0.0f64;
    for case in 0..20u64 {
        let mut r = rng::stream(9, case);
        let n = r.random_range(3..30);
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (r.random_range(-10.0..10.0), r.random_range(-10.0..10.0))).collect();
        let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
        let rows: Vec<Vec<f64>> = pts.iter().map(|&p| pts.iter().map(|&q| dist(p, q)).collect()).collect();
        let dm = DistanceMatrix::from_rows(rows.clone()).unwrap();
        let x = classical_mds(&dm, 2).unwrap();
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((dist((x[i][0], x[i][1]), (x[j][0], x[j][1])) - rows[i][j]).abs());
            }
        }
    }
    outcome(worst <= 1e-9, format!("20 random planar configurations, max distance error {worst:.2e}"))
}

// ------------------------------------------------------------ determinism

fn digests(dir: &Path) -> BTreeMap<String, String> {
    let m: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| (o["path"].as_str().unwrap().to_string(), o["sha256"].as_str().unwrap().to_string()))
        .collect()
}

fn cli_determinism() -> Outcome {
    let t = tempfile::TempDir::new().unwrap();
    let root = t.path();
    let run = |threads: &str, args: &[&str], out: &str| -> Result<(), String> {
        let o = Command::new(env!("CARGO_BIN_EXE_tdasum"))
            .current_dir(root)
            .arg("--threads")
            .arg(threads)
            .args(args)
            .arg("--out")
            .arg(out)
            .output()
            .map_err(|e| e.to_string())?;
        if o.status.success() {
            Ok(())
        } else {
            Err(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr).trim()))
        }
    };

    // inputs for the commands that consume files
    let setup: [&[&str]; 2] = [
        &["simulate-stix", "--seed", "4", "--count", "6", "--rows", "32", "--cols", "32"],
        &["simulate-gland", "--seed", "4", "--count", "2"],
    ];
    for (i, args) in setup.iter().enumerate() {
        if let Err(e) = run("1", args, &format!("in{i}")) {
            return outcome(false, e);
        }
    }
    let mut curves = Vec::new();
    for i in 0..6 {
        let field = format!("in0/stix_{i:04}.txt");
        if let Err(e) = run("1", &["diagram", "--field", &field, "--smooth"], &format!("d{i}")) {
            return outcome(false, e);
        }
        // summarize suffixes repeated input stems: diagram, diagram-2, ...
        curves.push(if i == 0 { "c/diagram.csv".to_string() } else { format!("c/diagram-{}.csv", i + 1) });
    }
    let diagrams: Vec<String> = (0..6).map(|i| format!("d{i}/diagram.csv")).collect();
    let mut summarize = vec!["summarize", "--kind", "landscape", "--k", "2", "--m", "64", "--diagram"];
    summarize.extend(diagrams.iter().map(String::as_str));
    if let Err(e) = run("1", &summarize, "c") {
        return outcome(false, e);
    }
    let c: Vec<&str> = curves.iter().map(String::as_str).collect();
    fs::write(root.join("labels.csv"), "id,label\n0,0\n1,0\n2,0\n3,1\n4,1\n5,1\n").unwrap();
    fs::write(
        root.join("stix.cfg"),
        "kind = stix\nseed = 3\nnull_df = 5\nalt_df = 7\nimages_per_group = 3\nreps = 3\nB = 50\nrows = 32\ncols = 32\n",
    )
    .unwrap();
    fs::write(
        root.join("gland.cfg"),
        "kind = gland\nseed = 3\ntrain_per_type = 6\ntest_per_type = 3\nkde_size = 32\nk_candidates = 1,3,5\n",
    )
    .unwrap();

    let commands: Vec<Vec<&str>> = vec![
        vec!["simulate-stix", "--seed", "11", "--count", "3", "--anti-alias"],
        vec!["simulate-gland", "--seed", "11", "--count", "3", "--irregularity", "0.4"],
        vec!["test", "--seed", "2", "--B", "500", "--group-a", c[0], c[1], c[2], "--group-b", c[3], c[4], c[5]],
        vec!["test", "--seed", "2", "--B", "500", "--metric-weight", "sigma", "--metric-p", "inf", "--group-a", c[0], c[1], c[2], "--group-b", c[3], c[4], c[5]],
        vec!["band", "--seed", "2", "--B", "300", "--curves", c[0], c[1], c[2], c[3], c[4], c[5]],
        vec!["band", "--seed", "2", "--B", "300", "--mode", "variable", "--curves", c[0], c[1], c[2], c[3], c[4], c[5]],
        vec!["predict", "--gamma", "0.8", "--curves", c[0], c[1], c[2], c[3], c[4], "--query", c[5]],
        vec!["classify", "--labels", "labels.csv", "--k-candidates", "1,3", "--train", c[0], c[1], c[2], c[3], c[4], c[5], "--query", c[0], c[4]],
        vec!["mds", "--curves", c[0], c[1], c[2], c[3], c[4], c[5]],
        vec!["diagram", "--cloud", "in1/gland_0000.csv", "--kde-h", "0.05", "--kde-size", "48"],
        vec!["experiment", "--config", "stix.cfg"],
        vec!["experiment", "--config", "gland.cfg"],
    ];
    let mut differing = Vec::new();
    let n = commands.len();
    for (i, args) in commands.iter().enumerate() {
        let mut seen = Vec::new();
        for (j, threads) in ["1", "4", "1"].iter().enumerate() {
            let out = format!("r{i}_{j}");
            if let Err(e) = run(threads, args, &out) {
                return outcome(false, e);
            }
            seen.push(digests(&root.join(&out)));
        }
        if seen.iter().any(|d| d != &seen[0] || d.is_empty()) {
            differing.push(args[0].to_string());
        }
    }
    outcome(
        differing.is_empty(),
        format!("{n} commands at --threads 1, 4 and a rerun; differing: {}", if differing.is_empty() { "none".to_string() } else { differing.join(", ") }),
    )
}

fn main() {
    let mut s = Suite { failed: 0, total: 0 };
    let secs = Duration::from_secs;
    s.run(1, "summary formulas vs brute-force oracle", secs(60), summary_oracle);
    s.run(2, "superlevel diagrams vs Betti oracle", secs(120), homology_oracle);
    s.run(3, "bootstrap band coverage", secs(300), bootstrap_coverage);
    s.run(4, "prediction set training coverage", secs(60), prediction_coverage);
    s.run(5, "STIX 5 vs 5 permutation p-values are null-calibrated", secs(900), stix_null);
    s.run(6, "STIX 5 vs 7 permutation test detects thickness change", secs(900), stix_power);
    s.run(7, "exact 2-vs-2 permutation oracle", secs(60), small_permutation);
    s.run(8, "gland classification", secs(600), gland_classification);
    s.run(9, "MDS fidelity", secs(1), mds_fidelity);
    s.run(10, "CLI determinism across thread counts", secs(120), cli_determinism);
    println!("{} of {} criteria passed", s.total - s.failed, s.total);
    if s.failed > 0 {
        std::process::exit(1);
    }
}
