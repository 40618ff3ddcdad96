//! End-to-end runs of the `kappa-bounds` binary.

use std::path::Path;
use std::process::{Command, Output};

use kappa_bounds::bound::BoundReport;
use kappa_bounds::report::VerificationReport;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kappa-bounds"))
        .args(args)
        .env_remove("KAPPA_BOUNDS_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn bound_json(args: &[&str]) -> BoundReport {
    let mut all = vec!["bound", "--format", "json"];
    all.extend_from_slice(args);
    let o = bin(&all);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn headline_five_by_ten() {
    let r = bound_json(&["--m", "5", "--n", "10", "--field", "real", "--x", "100", "--scaling", "raw"]);
    assert!(r.upper.probability > 5.9e-7 && r.upper.probability < 6.0e-7, "{}", r.upper.probability);
    assert!(r.valid);
    assert_eq!(r.upper.constant_used, 6.414);
    assert_eq!(r.lower.constant_used, 0.245);

    let o = bin(&["bound", "--m", "5", "--n", "10", "--x", "100", "--scaling", "raw"]);
    assert_eq!(o.status.code(), Some(0));
    let table = stdout(&o);
    assert!(table.contains("5.95"), "{table}");
    assert!(stderr(&o).is_empty());
}

#[test]
fn square_at_one_is_valid() {
    let r = bound_json(&["--m", "2", "--n", "2", "--x", "1"]);
    assert!(r.valid);
    assert_eq!(r.d, 1);
}

#[test]
fn warns_outside_validity_domain() {
    let o = bin(&["bound", "--m", "3", "--n", "10", "--field", "complex", "--x", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("below d = 8"), "{}", stderr(&o));
    assert!(stdout(&o).contains("valid       false"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["bound", "--m", "5", "--n", "10"],
        vec!["bound", "--m", "5", "--n", "10", "--x", "1", "--field", "quaternion"],
        vec!["bound", "--m", "1", "--n", "10", "--x", "1"],
        vec!["bound", "--m", "5", "--n", "10", "--x", "-1"],
        vec!["bound", "--m", "5", "--n", "10", "--x", "nan"],
        vec!["verify", "--grid", "no-such-grid"],
        vec!["curve", "--m", "2", "--n", "4", "--x-min", "10", "--x-max", "3"],
        vec!["curve", "--m", "2", "--n", "4", "--x-min", "0", "--x-max", "3"],
        vec!["frobnicate"],
    ] {
        let o = bin(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn deep_tail_with_ten_trials_is_refused() {
    let o = bin(&["verify", "--grid", "deep-tail", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("vacuous"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

fn verify_to(dir: &Path, name: &str, extra: &[&str]) -> (Output, String) {
    let path = dir.join(name);
    let mut args = vec!["verify", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = bin(&args);
    let text = std::fs::read_to_string(&path).unwrap_or_default();
    (o, text)
}

fn without_timestamp(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).unwrap();
    assert!(v.as_object_mut().unwrap().remove("generated_at_unix").is_some());
    v
}

#[test]
fn config_grid_report_is_deterministic_and_self_verifying() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.grid");
    std::fs::write(&cfg, "shapes = 2x3, 3x3\nfield = both\ntrials = 20000\n").unwrap();
    let grid = cfg.to_str().unwrap();
    let (o1, a) = verify_to(dir.path(), "a.json", &["--grid", grid, "--seed", "77", "--workers", "2"]);
    assert_eq!(o1.status.code(), Some(0), "{}", stderr(&o1));
    let (o2, b) = verify_to(dir.path(), "b.json", &["--grid", grid, "--seed", "77", "--workers", "2"]);
    assert_eq!(o2.status.code(), Some(0));
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
    // Byte-identical once the timestamp line is dropped.
    let strip = |s: &str| s.lines().filter(|l| !l.contains("generated_at_unix")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&a), strip(&b));

    let report: VerificationReport = serde_json::from_str(&a).unwrap();
    assert_eq!(report.schema, 1);
    assert_eq!(report.config.seed, 77);
    assert_eq!(report.config.trials, 20_000);
    assert_eq!(report.config.grid, "small");
    assert!(report.is_consistent());
    assert!(report.summary.all_pass);
    assert_eq!(report.cases.len(), 12);
    for c in &report.cases {
        assert!(c.upper.constant_used > 6.0 && c.lower.constant_used < 0.4);
        assert_eq!(c.oracle.is_some(), c.shape.m() == 2);
    }

    let (o3, c) = verify_to(dir.path(), "c.json", &["--grid", grid, "--seed", "78", "--workers", "2"]);
    assert_eq!(o3.status.code(), Some(0));
    assert_ne!(without_timestamp(&a), without_timestamp(&c));
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("g.grid");
    std::fs::write(&cfg, "shapes = 2x2\ntrials = 3000\n").unwrap();
    let out = dir.path().join("r.json");
    let o = Command::new(env!("CARGO_BIN_EXE_kappa-bounds"))
        .args(["verify", "--grid", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("KAPPA_BOUNDS_SEED", "4242")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: VerificationReport = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r.config.seed, 4242);
}

#[test]
fn tampered_report_exits_one_after_resealing() {
    // A report whose stored numbers show a violation gets a failing verdict
    // when recomputed, whatever its stored verdict says.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("g.grid");
    std::fs::write(&cfg, "shapes = 2x2\nthresholds = 2, 8\ntrials = 4000\n").unwrap();
    let (o, text) = verify_to(dir.path(), "r.json", &["--grid", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["cases"][1]["empirical"]["ci_high"] = Value::from(1e-9);
    let mut report: VerificationReport = serde_json::from_value(v).unwrap();
    assert!(!report.is_consistent());
    report.seal();
    assert!(!report.summary.all_pass);
    assert_eq!(report.summary.failed_cases, 1);
}

fn curve_rows(args: &[&str]) -> Vec<csv::StringRecord> {
    let mut all = vec!["curve"];
    all.extend_from_slice(args);
    let o = bin(&all);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["x_scaled", "x_raw", "upper_bound", "lower_bound", "valid", "oracle", "empirical", "ci_low", "ci_high"]
    );
    rdr.records().map(Result::unwrap).collect()
}

fn num(r: &csv::StringRecord, i: usize) -> f64 {
    r[i].parse().unwrap()
}

#[test]
fn curve_oracle_strictly_between_bounds() {
    let rows = curve_rows(&["--m", "2", "--n", "4", "--x-min", "3", "--x-max", "100", "--points", "40"]);
    assert_eq!(rows.len(), 40);
    for r in &rows {
        assert_eq!(&r[4], "true");
        let (up, lo, or) = (num(r, 2), num(r, 3), num(r, 5));
        assert!(lo < or && or < up, "{r:?}");
        assert!(r[6].is_empty() && r[7].is_empty() && r[8].is_empty());
    }
}

#[test]
fn single_point_curve_matches_bound() {
    for (field, x) in [("real", "7.5"), ("complex", "2")] {
        let rows = curve_rows(&["--m", "3", "--n", "7", "--field", field, "--x-min", x, "--x-max", x, "--points", "1"]);
        assert_eq!(rows.len(), 1);
        let b = bound_json(&["--m", "3", "--n", "7", "--field", field, "--x", x]);
        let r = &rows[0];
        assert_eq!(num(r, 0), b.x_scaled);
        assert_eq!(num(r, 1), b.x_raw);
        assert_eq!(num(r, 2), b.upper.probability);
        assert_eq!(num(r, 3), b.lower.probability);
        assert_eq!(r[4].parse::<bool>().unwrap(), b.valid);
        assert!(r[5].is_empty());
    }
}

#[test]
fn curve_with_trials_fills_empirical_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = bin(&[
        "curve", "--m", "2", "--n", "3", "--field", "complex", "--x-min", "2", "--x-max", "20", "--points", "5",
        "--trials", "20000", "--seed", "9", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    for r in rdr.records().map(Result::unwrap) {
        let (lo, est, hi) = (num(&r, 7), num(&r, 6), num(&r, 8));
        assert!(lo <= est && est <= hi);
        assert!(num(&r, 3) <= hi && num(&r, 2) >= lo);
    }
}
