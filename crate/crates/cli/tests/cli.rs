use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn tdasum(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdasum"))
        .current_dir(dir)
        .env_remove("TDASUM_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let o = tdasum(dir, args);
    assert!(o.status.success(), "{args:?} failed:\n{}", String::from_utf8_lossy(&o.stderr));
    o
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn kv(path: PathBuf) -> Vec<(String, String)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once('=').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn get(pairs: &[(String, String)], key: &str) -> String {
    pairs.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no {key}")).1.clone()
}

/// Diagram rows as `(dim, birth, death, essential)`.
fn diagram_rows(path: PathBuf) -> Vec<(usize, f64, f64, bool)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("dim"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap(), f[3] == "1")
        })
        .collect()
}

/// Curve file body as `(t, [k1, k2, ...])` rows.
fn curve_rows(path: PathBuf) -> Vec<(f64, Vec<f64>)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('t'))
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1..].to_vec())
        })
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn constant_curve(dir: &Path, name: &str, c: f64) -> String {
    let mut s = String::from("# kind=landscape dim=1\nt,k1\n");
    for i in 0..5 {
        s += &format!("{},{c}\n", i as f64 * 0.25);
    }
    write(dir, name, &s)
}

const RING: &str = "5 5 0 0 1 1\n0 0 0 0 0\n0 1 1 1 0\n0 1 0 1 0\n0 1 1 1 0\n0 0 0 0 0\n";

#[test]
fn ring_field_has_its_loop() {
    let t = TempDir::new().unwrap();
    write(t.path(), "ring.txt", RING);
    ok(t.path(), &["diagram", "--field", "ring.txt", "--max-dim", "1", "--out", "d"]);
    let rows = diagram_rows(t.path().join("d/diagram.csv"));
    let h1: Vec<_> = rows.iter().filter(|r| r.0 == 1 && r.2 > r.1).collect();
    assert_eq!(h1.len(), 1);
    assert_eq!((h1[0].1, h1[0].2), (-1.0, 0.0));
    assert!(t.path().join("d/manifest.json").exists());
}

#[test]
fn circle_cloud_has_a_prominent_loop() {
    let t = TempDir::new().unwrap();
    let mut s = String::from("x,y\n");
    for i in 0..60 {
        let a = i as f64 * std::f64::consts::TAU / 60.0;
        s += &format!("{},{}\n", a.cos(), a.sin());
    }
    write(t.path(), "circle.csv", &s);
    ok(t.path(), &["diagram", "--cloud", "circle.csv", "--kde-h", "0.1", "--kde-size", "64", "--out", "d"]);
    let rows = diagram_rows(t.path().join("d/diagram.csv"));
    let top = rows.iter().filter(|r| r.0 == 1).map(|r| r.2 - r.1).fold(0.0, f64::max);
    let peak = rows.iter().filter(|r| r.3).map(|r| r.2 - r.1).fold(0.0, f64::max);
    assert!(top > 0.5 * peak, "loop {top} vs peak {peak}");
}

#[test]
fn missing_input_writes_nothing() {
    let t = TempDir::new().unwrap();
    let o = tdasum(t.path(), &["diagram", "--field", "absent.txt", "--out", "d"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("absent.txt"));
    assert!(!t.path().join("d").exists());
}

#[test]
fn usage_errors_name_the_flag() {
    let t = TempDir::new().unwrap();
    write(t.path(), "ring.txt", RING);
    let o = tdasum(t.path(), &["diagram", "--field", "ring.txt", "--cloud", "c.csv", "--out", "d"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--cloud"), "{}", stderr(&o));
    write(t.path(), "c.csv", "x,y\n0,0\n");
    let o = tdasum(t.path(), &["diagram", "--cloud", "c.csv", "--out", "d"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--kde-h"));
    let o = tdasum(t.path(), &["simulate-stix", "--out", "s"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--seed"));
    let o = tdasum(t.path(), &["--threads", "0", "simulate-stix", "--seed", "1", "--out", "s"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!t.path().join("d").exists() && !t.path().join("s").exists());
}

#[test]
fn landscape_orders_beyond_the_points_are_zero() {
    let t = TempDir::new().unwrap();
    write(t.path(), "one.csv", "dim,birth,death,essential\n1,0,2,0\n");
    ok(t.path(), &["summarize", "--diagram", "one.csv", "--kind", "landscape", "--k", "3", "--m", "33", "--out", "c"]);
    let rows = curve_rows(t.path().join("c/one.csv"));
    assert_eq!(rows.len(), 33);
    assert!(rows.iter().any(|r| r.1[0] > 0.0));
    assert!(rows.iter().all(|r| r.1[1] == 0.0 && r.1[2] == 0.0));
}

#[test]
fn epanechnikov_glandscape_value() {
    let t = TempDir::new().unwrap();
    write(t.path(), "p.csv", "dim,birth,death,essential\n1,0,2,0\n");
    ok(
        t.path(),
        &[
            "summarize", "--diagram", "p.csv", "--kind", "glandscape", "--kernel", "epanechnikov", "--h", "0.5",
            "--t0", "0", "--t1", "2", "--m", "9", "--out", "c",
        ],
    );
    let rows = curve_rows(t.path().join("c/p.csv"));
    assert_eq!(rows[5].0, 1.25);
    assert!((rows[5].1[0] - 0.75).abs() < 1e-12, "{}", rows[5].1[0]);
}

#[test]
fn empty_silhouette_is_a_data_error() {
    let t = TempDir::new().unwrap();
    write(t.path(), "e.csv", "dim,birth,death,essential\n");
    let o = tdasum(t.path(), &["summarize", "--diagram", "e.csv", "--kind", "silhouette", "--out", "c"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("silhouette has zero total weight"));
    let o = tdasum(t.path(), &["summarize", "--diagram", "e.csv", "--kind", "glandscape", "--out", "c"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--h"));
}

#[test]
fn identical_constant_groups_give_p_one() {
    let t = TempDir::new().unwrap();
    let c: Vec<String> = (0..6).map(|i| constant_curve(t.path(), &format!("c{i}.csv"), 1.0)).collect();
    ok(
        t.path(),
        &["test", "--group-a", &c[0], &c[1], &c[2], "--group-b", &c[3], &c[4], &c[5], "--B", "50", "--seed", "7", "--out", "t"],
    );
    let r = kv(t.path().join("t/test.txt"));
    assert_eq!(get(&r, "p_value"), "1");
    assert_eq!(get(&r, "statistic"), "0");
}

#[test]
fn exhaustive_two_by_two() {
    let t = TempDir::new().unwrap();
    let [a1, a2, b1, b2] = [(0.0, "a1"), (0.0, "a2"), (1.0, "b1"), (1.0, "b2")]
        .map(|(c, n)| constant_curve(t.path(), &format!("{n}.csv"), c));
    ok(t.path(), &["test", "--group-a", &a1, &a2, "--group-b", &b1, &b2, "--exhaustive", "--out", "t"]);
    let r = kv(t.path().join("t/test.txt"));
    assert_eq!(get(&r, "relabelings"), "6");
    assert_eq!(get(&r, "exceedances"), "2");
}

#[test]
fn fixed_band_on_identical_curves_has_zero_width() {
    let t = TempDir::new().unwrap();
    let c: Vec<String> = (0..4).map(|i| constant_curve(t.path(), &format!("c{i}.csv"), 2.0)).collect();
    let mut args = vec!["band", "--curves"];
    args.extend(c.iter().map(String::as_str));
    args.extend(["--B", "40", "--seed", "1", "--out", "b"]);
    ok(t.path(), &args);
    assert_eq!(get(&kv(t.path().join("b/band.txt")), "half_width"), "0");
    assert_eq!(curve_rows(t.path().join("b/lower.csv")), curve_rows(t.path().join("b/upper.csv")));

    // the variable-width band divides by a zero standard deviation
    let pos = args.iter().position(|a| *a == "--out").unwrap();
    args.splice(pos..pos, ["--mode", "variable"]);
    *args.last_mut().unwrap() = "v";
    let o = tdasum(t.path(), &args);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(!t.path().join("v").exists());
}

#[test]
fn prediction_and_queries() {
    let t = TempDir::new().unwrap();
    let c: Vec<String> = (0..10).map(|i| constant_curve(t.path(), &format!("c{i}.csv"), i as f64)).collect();
    let far = constant_curve(t.path(), "far.csv", 100.0);
    let mut args = vec!["predict", "--curves"];
    args.extend(c.iter().map(String::as_str));
    args.extend(["--gamma", "0.8", "--query", "c4.csv", &far, "--metric-p", "inf", "--out", "p"]);
    ok(t.path(), &args);
    let r = kv(t.path().join("p/prediction.txt"));
    // residuals |i - 4.5| sorted: 0.5,0.5,1.5,1.5,...; the 8th is 3.5
    assert_eq!(get(&r, "q_hat"), "3.5");
    let q = fs::read_to_string(t.path().join("p/queries.csv")).unwrap();
    assert_eq!(q, "id,file,residual,inside\n0,c4,0.5,1\n1,far,95.5,0\n");
}

#[test]
fn classify_with_loocv() {
    let t = TempDir::new().unwrap();
    let values = [0.0, 0.1, 0.2, 0.3, 5.0, 5.1, 5.2, 5.3];
    let train: Vec<String> =
        values.iter().enumerate().map(|(i, &v)| constant_curve(t.path(), &format!("t{i}.csv"), v)).collect();
    write(t.path(), "labels.csv", "id,label\n0,0\n1,0\n2,0\n3,0\n4,1\n5,1\n6,1\n7,1\n");
    let q0 = constant_curve(t.path(), "q0.csv", 0.05);
    let q1 = constant_curve(t.path(), "q1.csv", 4.9);
    let mut args = vec!["classify", "--train"];
    args.extend(train.iter().map(String::as_str));
    args.extend(["--labels", "labels.csv", "--query", &q0, &q1, "--k-candidates", "1,3", "--out", "k"]);
    ok(t.path(), &args);
    let p = fs::read_to_string(t.path().join("k/predictions.csv")).unwrap();
    assert_eq!(p, "id,file,label\n0,q0,0\n1,q1,1\n");
    let r = kv(t.path().join("k/classify.txt"));
    assert_eq!((get(&r, "k"), get(&r, "loocv_error")), ("1".into(), "0".into()));
}

#[test]
fn mds_recovers_collinear_points() {
    let t = TempDir::new().unwrap();
    write(t.path(), "m.csv", "0,1,3\n1,0,2\n3,2,0\n");
    ok(t.path(), &["mds", "--matrix", "m.csv", "--dim", "1", "--out", "e"]);
    let text = fs::read_to_string(t.path().join("e/embedding.csv")).unwrap();
    let x: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let d = [[0.0, 1.0, 3.0], [1.0, 0.0, 2.0], [3.0, 2.0, 0.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!(((x[i] - x[j]).abs() - d[i][j]).abs() < 1e-9);
        }
    }
    let o = tdasum(t.path(), &["mds", "--matrix", "m.csv", "--dim", "4", "--out", "e2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn mismatched_grids_are_rejected() {
    let t = TempDir::new().unwrap();
    let a = constant_curve(t.path(), "a.csv", 0.0);
    write(t.path(), "b.csv", "# kind=landscape\nt,k1\n0,1\n1,1\n");
    let o = tdasum(t.path(), &["test", "--group-a", &a, "b.csv", "--group-b", &a, "--seed", "1", "--out", "t"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("b.csv"));
}

#[test]
fn malformed_file_reports_line() {
    let t = TempDir::new().unwrap();
    write(t.path(), "d.csv", "dim,birth,death,essential\n1,0,2,0\n1,zero,2,0\n");
    let o = tdasum(t.path(), &["summarize", "--diagram", "d.csv", "--kind", "apf", "--out", "c"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("d.csv: parse error at line 3"), "{}", stderr(&o));
}

#[test]
fn simulators_write_numbered_files() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["simulate-stix", "--seed", "5", "--count", "3", "--rows", "16", "--cols", "16", "--out", "s"]);
    ok(t.path(), &["simulate-gland", "--seed", "5", "--count", "2", "--irregularity", "0.5", "--out", "g"]);
    for f in ["s/stix_0000.txt", "s/stix_0002.txt", "g/gland_0001.csv"] {
        assert!(t.path().join(f).exists(), "{f}");
    }
    let m: serde_json::Value = serde_json::from_slice(&fs::read(t.path().join("s/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "simulate-stix");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 3);
    ok(t.path(), &["diagram", "--field", "s/stix_0000.txt", "--tiles", "2x2", "--max-dim", "0", "--out", "tiles"]);
    assert!(t.path().join("tiles/tile_1_1.csv").exists());
}

#[test]
fn experiment_config_errors_are_listed() {
    let t = TempDir::new().unwrap();
    write(t.path(), "e.cfg", "kind = stix\nseed = 1\nnull_df = 5\nalt_df = 5\nimages_per_group = 2\nB = 10\nfoo = 1\n");
    let o = tdasum(t.path(), &["experiment", "--config", "e.cfg", "--out", "x"]);
    assert_eq!(o.status.code(), Some(3));
    let e = stderr(&o);
    assert!(e.contains("missing required key 'reps'"), "{e}");
    assert!(e.contains("unknown key 'foo'"), "{e}");
    assert!(!t.path().join("x").exists());
}

#[test]
fn stix_experiment_matches_library_run() {
    use tdasum::simulate::{stix_experiment, StixConfig, StixExperiment};
    let t = TempDir::new().unwrap();
    write(
        t.path(),
        "e.cfg",
        "kind = stix\nseed = 21\nnull_df = 5\nalt_df = 5\nimages_per_group = 3\nreps = 3\nB = 20\n\
         rows = 32\ncols = 32\nsummaries = landscape:2\n",
    );
    ok(t.path(), &["experiment", "--config", "e.cfg", "--out", "x"]);
    let lib = stix_experiment(&StixExperiment {
        images_per_group: 3,
        reps: 3,
        b: 20,
        summaries: vec!["landscape:2".parse().unwrap()],
        image: StixConfig {
            rows: 32,
            cols: 32,
            ..Default::default()
        },
        seed: 21,
        ..Default::default()
    })
    .unwrap();
    let text = fs::read_to_string(t.path().join("x/p_values.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rep,landscape_j1,landscape_j2"));
    for (row, line) in lib.p_values.iter().zip(lines) {
        let got: Vec<f64> = line.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        assert_eq!(&got, row);
    }
}

#[test]
fn gland_experiment_confusion_rows_sum_to_test_counts() {
    let t = TempDir::new().unwrap();
    write(
        t.path(),
        "g.cfg",
        "kind = gland\nseed = 3\ntrain_per_type = 50\ntest_per_type = 10\nkde_size = 32\n",
    );
    ok(t.path(), &["experiment", "--config", "g.cfg", "--out", "x"]);
    let text = fs::read_to_string(t.path().join("x/confusion.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "actual,A,B,C,D");
    assert_eq!(rows.len(), 5);
    for r in &rows[1..] {
        let total: usize = r.split(',').skip(1).map(|v| v.parse::<usize>().unwrap()).sum();
        assert_eq!(total, 10, "{r}");
    }
    let rep = kv(t.path().join("x/report.txt"));
    assert_eq!(get(&rep, "summary"), "silhouette_p1");
}

#[test]
fn help_lists_defaults() {
    let t = TempDir::new().unwrap();
    for sub in ["diagram", "summarize", "test", "band", "predict", "classify", "mds", "simulate-stix", "simulate-gland", "experiment"] {
        let o = ok(t.path(), &[sub, "--help"]);
        let h = String::from_utf8_lossy(&o.stdout);
        assert!(h.contains("--out"), "{sub}");
        if sub != "experiment" && sub != "mds" {
            assert!(h.contains("[default:"), "{sub}: {h}");
        }
    }
}

#[test]
fn threads_do_not_change_outputs() {
    let t = TempDir::new().unwrap();
    let digests = |dir: &str| {
        let m: serde_json::Value =
            serde_json::from_slice(&fs::read(t.path().join(dir).join("manifest.json")).unwrap()).unwrap();
        m["outputs"].clone()
    };
    ok(t.path(), &["--threads", "1", "simulate-stix", "--seed", "8", "--count", "4", "--rows", "24", "--cols", "24", "--out", "a"]);
    ok(t.path(), &["--threads", "4", "simulate-stix", "--seed", "8", "--count", "4", "--rows", "24", "--cols", "24", "--out", "b"]);
    assert_eq!(digests("a"), digests("b"));
}
