use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

use liecompat::io::{parse_metric, LoadedMetric};
use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_liecompat");

static RUNS: AtomicUsize = AtomicUsize::new(0);

fn catalog(name: &str) -> String {
    format!("{}/../core/catalog/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

struct Run {
    code: i32,
    report: Value,
}

fn run(dir: &Path, args: &[&str]) -> Run {
    let json = dir.join(format!("report{}.json", RUNS.fetch_add(1, Ordering::Relaxed)));
    let out = Command::new(BIN)
        .args(args)
        .arg("--json")
        .arg(&json)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    let report = serde_json::from_str(&fs::read_to_string(&json).expect("report written")).expect("report is json");
    Run {
        code: out.status.code().expect("exit code"),
        report,
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn row<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no row {name} in {report}"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_catalog_entry() {
    let dir = TempDir::new().unwrap();
    let r = run(dir.path(), &["validate", &catalog("heisenberg")]);
    assert_eq!(r.code, 0);
    assert_eq!(row(&r.report, "jacobi")["status"], "pass");
    assert_eq!(r.report["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn validate_abelian_dim_four() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "ab4.json", r#"{"dim": 4, "brackets": []}"#);
    assert_eq!(run(dir.path(), &["validate", s(&p)]).code, 0);
}

#[test]
fn validate_names_failing_triple() {
    let dir = TempDir::new().unwrap();
    let p = write(
        dir.path(),
        "bad.json",
        r#"{"dim": 3, "brackets": [{"i": 1, "j": 2, "v": [0, 0, 1]}, {"i": 2, "j": 3, "v": [0, 1, 0]}]}"#,
    );
    let r = run(dir.path(), &["validate", s(&p)]);
    assert_eq!(r.code, 1);
    let jacobi = row(&r.report, "jacobi");
    assert_eq!(jacobi["status"], "fail");
    assert!(jacobi["detail"].as_str().unwrap().starts_with("worst at (e"));
}

#[test]
fn validate_rejects_misordered_bracket() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "bad.json", r#"{"dim": 2, "brackets": [{"i": 2, "j": 1, "v": [1, 0]}]}"#);
    let r = run(dir.path(), &["validate", s(&p)]);
    assert_eq!(r.code, 1);
    assert!(row(&r.report, "antisymmetry")["detail"].as_str().unwrap().contains("(2, 1)"));
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "broken.json", "{ not json");
    assert_eq!(run(dir.path(), &["validate", s(&p)]).code, 2);
    assert_eq!(run(dir.path(), &["validate", "missing.json"]).code, 2);
    assert_eq!(run(dir.path(), &["validate", "catalog:nope"]).code, 2);
    let out = Command::new(BIN)
        .args(["search", "catalog:heisenberg", "--signature", "x"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_abelian_identity() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "id.json", r#"{"matrix": [[1, 0], [0, 1]]}"#);
    let r = run(dir.path(), &["check", "catalog:abelian_2d", s(&m)]);
    assert_eq!(r.code, 0);
    assert_eq!(row(&r.report, "modular")["status"], "pass");
}

#[test]
fn check_heisenberg_identity() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "id.json", r#"{"matrix": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}"#);
    for scalar in ["rational", "float"] {
        let r = run(dir.path(), &["check", &catalog("heisenberg"), s(&m), "--scalar", scalar]);
        assert_eq!(r.code, 1);
        let pr = row(&r.report, "pr_residual");
        assert_eq!(pr["status"], "fail");
        assert_eq!(pr["residual"], 0.5);
        assert_eq!(pr["detail"], "worst at (e1,e1,e3)");
        assert_eq!(row(&r.report, "dpi")["status"], "fail");
        assert_eq!(row(&r.report, "cyclic")["status"], "pass");
    }
}

#[test]
fn check_degenerate_metric() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "deg.json", r#"{"matrix": [[1, 1], [1, 1]]}"#);
    let r = run(dir.path(), &["check", "catalog:nonabelian_2d", s(&m)]);
    assert_eq!(r.code, 1);
    assert!(row(&r.report, "metric")["detail"].as_str().unwrap().contains("degenerate"));
}

#[test]
fn search_writes_a_metric_that_rechecks() {
    let dir = TempDir::new().unwrap();
    let alg = write(dir.path(), "heis.json", &fs::read_to_string(catalog("heisenberg")).unwrap());
    let r = run(dir.path(), &["search", s(&alg), "--signature", "any"]);
    assert_eq!(r.code, 0);
    let found = row(&r.report, "search");
    assert_eq!(found["status"], "found");
    let cert = &found["payload"]["certificate"];
    assert_eq!(cert["exact"], true);

    let written = dir.path().join("heis.metric.json");
    let LoadedMetric::Rational(m) = parse_metric(&fs::read_to_string(&written).unwrap()).unwrap() else {
        panic!("rational metric expected");
    };
    let expected: Vec<Vec<String>> = serde_json::from_value(cert["rational"].clone()).unwrap();
    let got: Vec<Vec<String>> = m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(liecompat::scalar::format_rational).collect())
        .collect();
    assert_eq!(got, expected);

    let again = run(dir.path(), &["check", s(&alg), s(&written)]);
    assert_eq!(again.code, 0);
    assert_eq!(row(&again.report, "pr_residual")["residual"], 0.0);
}

#[test]
fn search_heisenberg_riemann_not_found() {
    let dir = TempDir::new().unwrap();
    let r = run(dir.path(), &["search", "catalog:heisenberg", "--signature", "riemann", "--restarts", "16", "--seed", "5"]);
    assert_eq!(r.code, 3);
    let p = &row(&r.report, "search")["payload"];
    assert_eq!(p["seed"], 5);
    assert_eq!(p["restarts_run"], 16);
    assert!(!dir.path().join("heisenberg.metric.json").exists());
}

#[test]
fn riemannian_family_member_has_vanishing_modular_field() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("e2.metric.json");
    let r = run(dir.path(), &["search", "catalog:family_e2", "--signature", "riemann", "--out", s(&out)]);
    assert_eq!(r.code, 0);
    let c = run(dir.path(), &["check", "catalog:family_e2", s(&out)]);
    assert_eq!(c.code, 0);
    let modular = row(&c.report, "modular");
    assert_eq!(modular["status"], "pass");
    assert!(modular["residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn classify_dimension_two() {
    let dir = TempDir::new().unwrap();
    let r = run(dir.path(), &["classify", "--dim", "2"]);
    assert_eq!(r.code, 0);
    assert!(row(&r.report, "summary")["detail"].as_str().unwrap().contains("0 hard"));
}

#[test]
fn dual_sweep_records() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "id.json", r#"{"matrix": [["1", "0"], ["0", "1"]]}"#);
    let pts = write(dir.path(), "pts.json", "[[1, 0], [0.5, -2]]");
    let out = dir.path().join("sweep.json");
    let r = run(
        dir.path(),
        &["dual-sweep", "catalog:nonabelian_2d", s(&m), "--points", s(&pts), "--checks", "modular,cyclic", "--out", s(&out)],
    );
    assert_eq!(r.code, 0);
    let recs: Vec<Value> = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(recs.len(), 4);
    for rec in &recs {
        assert!(rec["point"].is_array() && rec["check"].is_string() && rec.get("value").is_some());
    }
    assert_eq!(recs[0]["check"], "modular");
    assert!((recs[0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn dual_sweep_to_stdout_is_json() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(BIN)
        .args(["dual-sweep", "catalog:heisenberg", "missing.json", "--count", "3"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    // missing metric file: nothing on stdout, input error
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let m = write(dir.path(), "id.json", r#"{"matrix": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}"#);
    let out = Command::new(BIN)
        .args(["dual-sweep", "catalog:heisenberg", s(&m), "--count", "3"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let recs: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(recs.len(), 15);
}

#[test]
fn reports_reproduce() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "id.json", r#"{"matrix": [[2, 0, 0], [0, -1, 0], [0, 0, 1]]}"#);
    for args in [
        vec!["search", "catalog:family_e11", "--restarts", "8", "--seed", "11", "--out", "e11.json"],
        vec!["check", "catalog:e2_plus_r", s(&m), "--seed", "4", "--scalar", "float"],
    ] {
        let first = run(dir.path(), &args);
        let argv: Vec<String> = serde_json::from_value(first.report["command"].clone()).unwrap();
        let replay: Vec<&str> = argv[1..].iter().map(String::as_str).collect();
        let second = run(dir.path(), &replay[..replay.len() - 2]);
        assert_eq!(first.code, second.code);
        assert_eq!(first.report["checks"], second.report["checks"]);
        assert_eq!(first.report["inputs"], second.report["inputs"]);
    }
}
