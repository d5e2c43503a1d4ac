//! Result files are assembled in memory and only written once a command has
//! fully succeeded, together with `manifest.json`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";

/// Everything a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub files: Vec<(String, Vec<u8>)>,
}

impl Outcome {
    pub fn new(seed: Option<u64>) -> Self {
        Outcome {
            seed,
            ..Default::default()
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn file(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn text(&mut self, name: impl Into<String>, pairs: &[(&str, String)]) {
        let mut buf = Vec::new();
        tdasum::io::write_kv(&mut buf, pairs).expect("writing to memory");
        self.file(name, buf);
    }
}

#[derive(Debug, Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    args: &'a [String],
    seed: Option<u64>,
    version: &'static str,
    threads: usize,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    wall_time_seconds: f64,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Output file name derived from an input path: its stem with anything but
/// `[A-Za-z0-9._-]` replaced by `_`.
pub fn stem(path: &Path) -> String {
    let s = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let s: String = s
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '_' })
        .collect();
    if s.is_empty() || s.starts_with('.') {
        format!("input{s}")
    } else {
        s
    }
}

/// Distinct output names for a list of inputs, suffixing repeated stems.
pub fn unique_stems(paths: &[PathBuf]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    paths
        .iter()
        .map(|p| {
            let base = stem(p);
            let mut name = base.clone();
            let mut i = 2;
            while !seen.insert(name.clone()) {
                name = format!("{base}-{i}");
                i += 1;
            }
            name
        })
        .collect()
}

/// Writes the outcome's files and manifest into `out`.
pub fn write_all(
    out: &Path,
    command: &str,
    args: &[String],
    threads: usize,
    outcome: &Outcome,
    wall_time_seconds: f64,
) -> CliResult<()> {
    let io_err = |p: &Path, e: std::io::Error| CliError::Data(format!("{}: {e}", p.display()));
    let mut inputs = Vec::with_capacity(outcome.inputs.len());
    for p in &outcome.inputs {
        let bytes = fs::read(p).map_err(|e| io_err(p, e))?;
        inputs.push(FileDigest {
            path: p.display().to_string(),
            sha256: sha256(&bytes),
        });
    }
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let mut outputs = Vec::with_capacity(outcome.files.len());
    for (name, bytes) in &outcome.files {
        debug_assert!(!name.contains(['/', '\\']) && name != MANIFEST);
        let p = out.join(name);
        fs::write(&p, bytes).map_err(|e| io_err(&p, e))?;
        outputs.push(FileDigest {
            path: name.clone(),
            sha256: sha256(bytes),
        });
    }
    let manifest = RunManifest {
        command,
        args,
        seed: outcome.seed,
        version: env!("CARGO_PKG_VERSION"),
        threads,
        inputs,
        outputs,
        wall_time_seconds,
    };
    let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    json.push(b'\n');
    let p = out.join(MANIFEST);
    fs::write(&p, json).map_err(|e| io_err(&p, e))
}
