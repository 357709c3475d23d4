use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tautrec"))
        .args(args)
        .env_remove("TAUTREC_CACHE")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn graph_count() {
    let out = run(&["graphs", "--genus", "1", "--markings", "2", "--count-only"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "5");
    let v = json(&[
        "graphs",
        "--genus",
        "2",
        "--markings",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(v["count"], 7);
    assert_eq!(v["schema"], "tautrec.graphs.v1");
}

#[test]
fn intersect_values() {
    let v = json(&[
        "intersect",
        "--genus",
        "1",
        "--psi",
        "2,0",
        "--format",
        "json",
    ]);
    assert_eq!(v["value"], "1/24");
    let v = json(&[
        "intersect",
        "--genus",
        "2",
        "--psi",
        "4",
        "--format",
        "json",
        "--oracle-check",
    ]);
    assert_eq!(v["value"], "1/1152");
}

#[test]
fn intersect_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let p = path.to_str().unwrap();
    let a = json(&[
        "intersect",
        "--genus",
        "2",
        "--psi",
        "3,2",
        "--cache",
        p,
        "--format",
        "json",
    ]);
    assert!(path.exists());
    let b = json(&[
        "intersect",
        "--genus",
        "2",
        "--psi",
        "3,2",
        "--cache",
        p,
        "--format",
        "json",
    ]);
    assert_eq!(a, b);
    std::fs::write(&path, "{\"version\": 99, \"entries\": []}").unwrap();
    assert_eq!(
        run(&["intersect", "--genus", "1", "--psi", "1", "--cache", p])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn trr_bouquet_and_tails() {
    let v = json(&[
        "trr", "--genus", "1", "--psi", "1,0", "--show", "bouquet", "--format", "json",
    ]);
    assert_eq!(v["bouquet"], "1/24");
    assert_eq!(v["normalization"], "NormalForm");
    let v = json(&["trr", "--genus", "2", "--psi", "1,1", "--format", "json"]);
    assert_eq!(v["bouquet"], "1/576");
    let out = run(&[
        "trr",
        "--genus",
        "2",
        "--psi",
        "1,1",
        "--show",
        "rational-tails",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("3/1"));
}

#[test]
fn dr_output_is_a_formal_sum() {
    let v = json(&[
        "dr",
        "--genus",
        "1",
        "--markings",
        "2",
        "--degree",
        "1",
        "--a",
        "2",
    ]);
    assert_eq!(v["schema"], "tautrec.formal_sum.v1");
    assert!(!v["terms"].as_array().unwrap().is_empty());
    let out = run(&[
        "dr",
        "--genus",
        "1",
        "--markings",
        "2",
        "--degree",
        "1",
        "--a",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_kernel_suite() {
    let v = json(&[
        "verify",
        "--suite",
        "kernel",
        "--max-genus",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(v["schema"], "tautrec.verify.v1");
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn invalid_input_exit_codes() {
    for args in [
        &["intersect", "--genus", "0", "--psi", "5"][..],
        &["intersect", "--genus", "1", "--psi", "3"],
        &["graphs", "--genus", "0", "--markings", "2"],
        &["frobnicate"],
        &["trr", "--genus", "1"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}
