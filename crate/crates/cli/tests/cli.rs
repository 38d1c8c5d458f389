use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plurigreen"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn real(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.as_f64().unwrap(),
        Value::String(s) if s == "-inf" => f64::NEG_INFINITY,
        Value::String(s) if s == "inf" => f64::INFINITY,
        Value::String(s) if s == "nan" => f64::NAN,
        other => panic!("not a real: {other}"),
    }
}

/// Bidisc hyperplane config with a small search budget.
fn cheap_bidisc(dir: &Path) -> PathBuf {
    let path = dir.join("cheap.json");
    std::fs::write(
        &path,
        r#"{
            "domain": {"kind": "polydisc", "dim": 2},
            "functional": "lelong",
            "subspace": [[[[1, 0], 1.0, 0.0]]],
            "closed_form": {"kind": "polydisc_hyperplane"},
            "optimizer": {"degree": 12, "restarts": 2, "iterations": 150, "seed": 3},
            "grids": {"line": "-0.6:0.6:3,0,0.5,0"}
        }"#,
    )
    .unwrap();
    path
}

#[test]
fn eval_ball_hyperplane_brackets_closed_form() {
    let cfg = configs().join("ball_hyperplane.json");
    let out = run(&["eval", "--config", cfg.to_str().unwrap(), "--point", "0.5,0,0.6,0", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["seed"], 7);
    assert_eq!(doc["config_hash"].as_str().unwrap().len(), 64);
    let rec = &doc["records"][0];
    let exact = real(&rec["closed_form"]);
    assert!((exact - (-0.4700)).abs() < 1e-4);
    assert!((real(&rec["lower"]) - exact).abs() < 1e-12);
    let bracket = real(&rec["bracket"]);
    assert!((0.0..=2e-2).contains(&bracket), "bracket {bracket}");
}

#[test]
fn eval_on_the_subspace_is_minus_infinity_without_search() {
    let cfg = configs().join("ball_hyperplane.json");
    let out = run(&["eval", "--config", cfg.to_str().unwrap(), "--point", "0,0,0.4,0.1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("upper        -inf"), "{text}");
    assert!(text.contains("evaluations  0"), "{text}");
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"domain\": {\"kind\": \"ball\", \"dim\": 2},\n  \"functional\": \"nope\"\n}").unwrap();
    let out = run(&["eval", "--config", path.to_str().unwrap(), "--point", "0.1,0,0.1,0"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 3"), "{msg}");
}

#[test]
fn missing_config_is_an_io_error() {
    let out = run(&["eval", "--config", "/nonexistent/config.json", "--point", "0.1,0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exterior_point_and_bad_flags_are_usage_errors() {
    let cfg = configs().join("ball_hyperplane.json");
    let out = run(&["eval", "--config", cfg.to_str().unwrap(), "--point", "0.9,0,0.9,0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["eval", "--config", cfg.to_str().unwrap(), "--point", "0.1,x"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn scan_csv_reports_the_closed_form_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cheap_bidisc(dir.path());
    let csv_path = dir.path().join("scan.csv");
    let out = run(&[
        "scan", "--config", cfg.to_str().unwrap(), "--grid", "line", "--out", csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for (row, z1) in rows.iter().zip([-0.6f64, 0.0, 0.6]) {
        let closed = &row[col("closed_form")];
        let upper = &row[col("upper")];
        if z1 == 0.0 {
            assert_eq!(closed, "-inf");
            assert_eq!(upper, "-inf");
        } else {
            let c: f64 = closed.parse().unwrap();
            assert!((c - z1.abs().ln()).abs() < 1e-12);
            assert!(upper.parse::<f64>().unwrap() >= c - 1e-9);
        }
    }
}

#[test]
fn empty_grid_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cheap_bidisc(dir.path());
    let csv_path = dir.path().join("empty.csv");
    let out = run(&[
        "scan", "--config", cfg.to_str().unwrap(), "--grid", "0:1:0,0,0,0", "--out", csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("key,point,inside,closed_form"));
}

#[test]
fn scan_json_records_match_eval() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cheap_bidisc(dir.path());
    let json_path = dir.path().join("scan.json");
    let out = run(&[
        "scan", "--config", cfg.to_str().unwrap(), "--grid", "0.3:0.5:2,0,0.5,0", "--out",
        json_path.to_str().unwrap(), "--format", "json",
    ]);
    assert!(out.status.success());
    let scan: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    for rec in scan["records"].as_array().unwrap() {
        let point: Vec<String> = rec["point"].as_array().unwrap().iter().map(|v| real(v).to_string()).collect();
        let out = run(&["eval", "--config", cfg.to_str().unwrap(), "--point", &point.join(","), "--format", "json"]);
        assert!(out.status.success());
        let mut single = stdout_json(&out)["records"][0].clone();
        single["key"] = rec["key"].clone();
        assert_eq!(&single, rec);
    }
    assert_eq!(scan["config_hash"], stdout_json(&run(&[
        "eval", "--config", cfg.to_str().unwrap(), "--point", "0.1,0,0.1,0", "--format", "json",
    ]))["config_hash"]);
}

#[test]
fn svg_heatmap_uses_sentinel_for_poles() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cheap_bidisc(dir.path());
    let svg_path = dir.path().join("map.svg");
    let out = run(&[
        "scan", "--config", cfg.to_str().unwrap(), "--grid", "-0.2:0.2:3,0,0:0.4:2,0", "--out",
        svg_path.to_str().unwrap(), "--format", "svg",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<rect").count(), 6);
    assert!(svg.contains("#ff00ff"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cheap_bidisc(dir.path());
    let out = run(&[
        "scan", "--config", cfg.to_str().unwrap(), "--grid", "0:1:0,0,0,0", "--out", "/nonexistent/dir/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_rejects_unknown_suites() {
    let out = run(&["verify", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ball-hyperplane"));
}

#[test]
fn verify_determinism_reports_are_byte_identical() {
    let a = run(&["verify", "--suite", "determinism", "--seed", "11"]);
    let b = bin()
        .args(["verify", "determinism", "--seed", "11"])
        .env("PLURIGREEN_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let doc = stdout_json(&a);
    assert_eq!(doc["suite"], "determinism");
    assert_eq!(doc["seed"], 11);
    assert_eq!(doc["passed"], true);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = bin().args(["verify", "determinism"]).env("PLURIGREEN_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
