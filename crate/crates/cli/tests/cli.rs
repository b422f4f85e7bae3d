use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nbsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nbsc"))
        .args(args)
        .env("NBSC_WORKERS", "1")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = nbsc(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn oo_solve_reports_the_optimum() {
    let v = json(&["oo-solve", "--kappa", "7", "--L", "30"]);
    assert_eq!(v["F_star"], 1170);
    assert!(v["optima"]
        .as_array()
        .unwrap()
        .contains(&serde_json::json!([3, 4, 3, 0, 1, 2, 0])));
}

#[test]
fn cpo_then_count_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.json");
    let v = json(&["cpo", "--kappa", "7", "--L", "30", "--out", path(&code), "--trace"]);
    let f = v["F_SC"].as_u64().unwrap();
    assert!(f <= 609);
    assert!(v["trace"].as_array().unwrap().len() >= 2);

    let c = json(&["count", "ugast3330", "--code", path(&code)]);
    assert_eq!(c["F_SC"].as_u64(), Some(f));
    let c = json(&["count", "cycles6", "--code", path(&code)]);
    assert_eq!(c["cycles6"].as_u64(), Some(f));

    let alist = dir.path().join("code.alist");
    let out = nbsc(&["export-alist", "--code", path(&code), "--out", path(&alist)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&alist).unwrap();
    assert_eq!(text.lines().next(), Some("1470 651"));
}

#[test]
fn baselines() {
    assert_eq!(
        json(&["baseline", "--method", "cv", "--kappa", "7", "--L", "30"])["F_SC"],
        3290
    );
    assert_eq!(
        json(&["baseline", "--method", "mo", "--kappa", "7", "--L", "30"])["F_SC"],
        609
    );
    let out = nbsc(&["baseline", "--method", "mo", "--kappa", "11", "--L", "30"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--long"));
}

#[test]
fn gast_scan_needs_labels() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.json");
    json(&["cpo", "--kappa", "7", "--L", "30", "--out", path(&code)]);
    let out = nbsc(&["gast", "scan", "--code", path(&code)]);
    assert!(!out.status.success());
    let found = json(&[
        "gast",
        "scan",
        "--code",
        path(&code),
        "--seed",
        "1",
        "--targets",
        "(3,3,3,3,0)",
        "--amax",
        "3",
    ]);
    assert!(!found.as_array().unwrap().is_empty());
    let after = dir.path().join("after.json");
    let removed = json(&[
        "gast",
        "remove",
        "--code",
        path(&code),
        "--seed",
        "1",
        "--targets",
        "(3,3,3,3,0)",
        "--amax",
        "3",
        "--out",
        path(&after),
    ]);
    assert!(removed.as_array().unwrap().iter().all(|r| r["success"] == true));
    assert!(after.exists());
}

#[test]
fn pipeline_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = nbsc(&["pipeline", "--kappa", "7", "--L", "30", "--out-dir", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("F*=1170"));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report["census_after_cpo"]["F_SC"].as_u64().unwrap() <= 609);
    assert!(dir.path().join("code.json").exists());
    assert!(dir.path().join("code.alist").exists());

    // The written report is a valid configuration source for a rerun.
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, report["config"].to_string()).unwrap();
    let again = nbsc(&["pipeline", "--config", path(&cfg)]);
    assert!(again.status.success());
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn pipeline_failure_names_the_stage() {
    let out = nbsc(&["pipeline", "--kappa", "7", "--p", "8", "--L", "30"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("config"));
}

#[test]
fn table_renders_small_sizes() {
    let out = nbsc(&["table1", "--sizes", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    for n in ["8820", "3290", "609"] {
        assert!(text.contains(n), "{text}");
    }
}
