//! Experiment config files: flat `key = value`, validated as a whole so that
//! every problem is reported in one go.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::str::FromStr;

use tdasum::io::Config;
use tdasum::simulate::{GlandConfig, GlandExperiment, Raster, StixConfig, StixExperiment};
use tdasum::smoothing::LoessSpec;
use tdasum::summaries::SummarySpec;
use tdasum::{inference::PValueRule, Kernel, MetricSpec};

use crate::error::{CliError, CliResult};

#[derive(Debug)]
pub enum Experiment {
    Stix(StixExperiment),
    Gland(GlandExperiment),
}

pub const STIX_KEYS: &[&str] = &[
    "kind", "seed", "null_df", "alt_df", "images_per_group", "reps", "B", "summaries", "dim", "n_sticks",
    "rows", "cols", "foreground", "background", "raster", "loess_frac", "metric_p", "grid_size", "p_value",
];
pub const GLAND_KEYS: &[&str] = &[
    "kind", "seed", "train_per_type", "test_per_type", "n_points", "radius", "jitter", "kde_kernel", "kde_h",
    "kde_size", "summaries", "dim", "k_candidates", "metric_p", "grid_size",
];

struct Reader<'a> {
    cfg: &'a Config,
    errors: Vec<String>,
    known: BTreeSet<&'static str>,
}

impl<'a> Reader<'a> {
    fn new(cfg: &'a Config, known: &[&'static str]) -> Self {
        Reader {
            cfg,
            errors: Vec::new(),
            known: known.iter().copied().collect(),
        }
    }

    fn parse<T>(&mut self, key: &str, raw: &str, f: impl FnOnce(&str) -> Option<T>) -> Option<T> {
        let v = f(raw);
        if v.is_none() {
            let line = self.cfg.line(key).unwrap_or(0);
            self.errors.push(format!("line {line}: invalid value '{raw}' for '{key}'"));
        }
        v
    }

    fn with<T>(&mut self, key: &str, f: impl FnOnce(&str) -> Option<T>) -> Option<T> {
        let raw = self.cfg.get(key)?.to_string();
        self.parse(key, &raw, f)
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Option<T> {
        if self.cfg.get(key).is_none() {
            self.errors.push(format!("missing required key '{key}'"));
            return None;
        }
        self.with(key, |s| s.parse().ok())
    }

    fn optional<T: FromStr>(&mut self, key: &str, default: T) -> T {
        self.with(key, |s| s.parse().ok()).unwrap_or(default)
    }

    fn list<T: FromStr>(&mut self, key: &str, default: Vec<T>) -> Vec<T> {
        self.with(key, |s| {
            s.split(',').map(|x| x.trim().parse().ok()).collect::<Option<Vec<T>>>().filter(|v| !v.is_empty())
        })
        .unwrap_or(default)
    }

    fn check(&mut self, ok: bool, message: impl Display) {
        if !ok {
            self.errors.push(message.to_string());
        }
    }

    fn finish(mut self) -> CliResult<()> {
        let unknown: Vec<String> = self
            .cfg
            .keys()
            .filter(|k| !self.known.contains(k))
            .map(|k| format!("line {}: unknown key '{k}'", self.cfg.line(k).unwrap_or(0)))
            .collect();
        self.errors.extend(unknown);
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(CliError::Data(format!("invalid experiment config:\n  {}", self.errors.join("\n  "))))
        }
    }
}

fn metric_p(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|p| *p > 0.0)
}

/// Parses and validates an experiment config. `seed` and `summaries` given on
/// the command line take precedence over the file.
pub fn parse_experiment(text: &str, seed: Option<u64>, summaries: Option<&[SummarySpec]>) -> CliResult<Experiment> {
    let cfg = Config::parse(text).map_err(|e| CliError::Data(format!("invalid experiment config: {e}")))?;
    match cfg.get("kind") {
        Some("stix") => parse_stix(&cfg, seed, summaries).map(Experiment::Stix),
        Some("gland") => parse_gland(&cfg, seed, summaries).map(Experiment::Gland),
        Some(other) => Err(CliError::Data(format!(
            "invalid experiment config:\n  line {}: kind must be 'stix' or 'gland', got '{other}'",
            cfg.line("kind").unwrap_or(0)
        ))),
        None => Err(CliError::Data("invalid experiment config:\n  missing required key 'kind'".into())),
    }
}

fn seed_of(r: &mut Reader, seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => {
            r.with("seed", |v| v.parse::<u64>().ok());
            s
        }
        None => r.required("seed").unwrap_or(0),
    }
}

fn parse_stix(cfg: &Config, seed: Option<u64>, summaries: Option<&[SummarySpec]>) -> CliResult<StixExperiment> {
    let mut r = Reader::new(cfg, STIX_KEYS);
    let d = StixExperiment::default();
    let seed = seed_of(&mut r, seed);
    let null_df = r.required("null_df");
    let alt_df = r.required("alt_df");
    let images_per_group = r.required("images_per_group");
    let reps = r.required("reps");
    let b = r.required("B");
    let file_summaries = r.list("summaries", d.summaries.clone());
    let raster = r
        .with("raster", |s| match s {
            "hard" => Some(Raster::Hard),
            "anti-aliased" => Some(Raster::AntiAliased),
            _ => None,
        })
        .unwrap_or_default();
    let rule = r
        .with("p_value", |s| match s {
            "proportion" => Some(PValueRule::Proportion),
            "add-one" => Some(PValueRule::AddOne),
            _ => None,
        })
        .unwrap_or_default();
    let image = StixConfig {
        n_sticks: r.optional("n_sticks", d.image.n_sticks),
        rows: r.optional("rows", d.image.rows),
        cols: r.optional("cols", d.image.cols),
        foreground: r.optional("foreground", d.image.foreground),
        background: r.optional("background", d.image.background),
        raster,
        ..d.image
    };
    let loess = LoessSpec {
        neighbor_fraction: r.optional("loess_frac", d.loess.neighbor_fraction),
    };
    let p = r.with("metric_p", metric_p).unwrap_or(2.0);
    let exp = StixExperiment {
        null_df: null_df.unwrap_or(d.null_df),
        alt_df: alt_df.unwrap_or(d.alt_df),
        images_per_group: images_per_group.unwrap_or(d.images_per_group),
        reps: reps.unwrap_or(d.reps),
        b: b.unwrap_or(d.b),
        summaries: summaries.map(<[_]>::to_vec).unwrap_or(file_summaries),
        dim: r.optional("dim", d.dim),
        image,
        loess,
        metric: MetricSpec::lp(p),
        grid_size: r.optional("grid_size", d.grid_size),
        rule,
        seed,
    };
    if r.errors.is_empty() {
        if let Err(e) = exp.validate() {
            r.errors.push(e.to_string());
        }
        let f = exp.loess.neighbor_fraction;
        r.check(f > 0.0 && f <= 1.0, format!("loess_frac must be in (0, 1], got {f}"));
        r.check(exp.grid_size >= 2, "grid_size must be at least 2");
    }
    r.finish()?;
    Ok(exp)
}

fn parse_gland(cfg: &Config, seed: Option<u64>, summaries: Option<&[SummarySpec]>) -> CliResult<GlandExperiment> {
    let mut r = Reader::new(cfg, GLAND_KEYS);
    let d = GlandExperiment::default();
    let seed = seed_of(&mut r, seed);
    let train = r.required("train_per_type");
    let test = r.required("test_per_type");
    let file_summaries = r.list("summaries", d.summaries.clone());
    let gland = GlandConfig {
        n_points: r.optional("n_points", d.gland.n_points),
        radius: r.optional("radius", d.gland.radius),
        jitter: r.optional("jitter", d.gland.jitter),
        ..d.gland
    };
    let kde_kernel: Kernel = r.optional("kde_kernel", d.kde_kernel);
    let p = r.with("metric_p", metric_p).unwrap_or(2.0);
    let exp = GlandExperiment {
        train_per_type: train.unwrap_or(d.train_per_type),
        test_per_type: test.unwrap_or(d.test_per_type),
        gland,
        kde_kernel,
        kde_h: r.optional("kde_h", d.kde_h),
        kde_size: r.optional("kde_size", d.kde_size),
        summaries: summaries.map(<[_]>::to_vec).unwrap_or(file_summaries),
        dim: r.optional("dim", d.dim),
        k_candidates: r.list("k_candidates", d.k_candidates.clone()),
        metric: MetricSpec::lp(p),
        grid_size: r.optional("grid_size", d.grid_size),
        seed,
    };
    if r.errors.is_empty() {
        if let Err(e) = exp.gland.validate() {
            r.errors.push(e.to_string());
        }
        r.check(exp.train_per_type >= 2, "train_per_type must be at least 2");
        r.check(exp.test_per_type >= 1, "test_per_type must be at least 1");
        r.check(exp.kde_h > 0.0 && exp.kde_h.is_finite(), "kde_h must be positive");
        r.check(exp.kde_size >= 2, "kde_size must be at least 2");
        r.check(exp.dim <= 1, "dim must be 0 or 1");
        r.check(exp.grid_size >= 2, "grid_size must be at least 2");
        let n = 4 * exp.train_per_type;
        for &k in &exp.k_candidates {
            r.check(k >= 1 && k < n, format!("k candidate {k} must be in 1..{n}"));
        }
    }
    r.finish()?;
    Ok(exp)
}
