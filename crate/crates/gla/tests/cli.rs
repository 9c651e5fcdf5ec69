//! End-to-end tests of the `gla` binary: exit codes, artifacts, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn gla(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gla"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_dir_sorted(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    entries
}

#[test]
fn scenario_writes_report_and_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let res = gla(&["scenario", "waveguide_braided", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["schema"], 1);
    assert_eq!(report["config"]["scenario"], "waveguide_braided");
    assert_eq!(report["is_dfh"], true);
    // every headline number carries a provenance tag
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        let p = c["provenance"].as_str().unwrap();
        assert!(p == "expected" || p == "computed", "bad provenance {p}");
    }
    // the rate matrices land as coordinate-list CSV
    let k_csv = std::fs::read_to_string(out.join("rates_k.csv")).unwrap();
    assert!(k_csv.starts_with("row,col,re,im"), "got header {:?}", k_csv.lines().next());
}

#[test]
fn identical_config_gives_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let res = gla(&["scenario", "graphene3", "--set", "cells=15", "--out", dir.to_str().unwrap()]);
        assert_eq!(code(&res), 0, "stderr: {}", String::from_utf8_lossy(&res.stderr));
    }
    let files_a = read_dir_sorted(&a);
    let files_b = read_dir_sorted(&b);
    assert_eq!(files_a.len(), files_b.len());
    assert!(files_a.len() >= 2);
    for (fa, fb) in files_a.iter().zip(files_b.iter()) {
        assert_eq!(fa.file_name(), fb.file_name());
        let (ba, bb) = (std::fs::read(fa).unwrap(), std::fs::read(fb).unwrap());
        assert_eq!(ba, bb, "{:?} differs between reruns", fa.file_name());
    }
}

#[test]
fn run_subcommand_accepts_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("pair.json");
    std::fs::write(
        &cfg,
        r#"{ "schema": 1, "scenario": "waveguide_serial", "params": { "g": 0.08 } }"#,
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = gla(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["params"]["g"], 0.08);
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // unknown scenario name
    assert_eq!(code(&gla(&["scenario", "no_such_thing"])), 2);
    // malformed --set
    assert_eq!(code(&gla(&["scenario", "waveguide_braided", "--set", "g"])), 2);
    // inadmissible string length (the 5 + 6ν family)
    let res = gla(&[
        "scenario",
        "lieb_pair",
        "--set",
        "length=7",
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 2);
    assert!(String::from_utf8_lossy(&res.stderr).contains("5 + 6ν"));
    // missing config file
    assert_eq!(code(&gla(&["run", tmp.path().join("missing.json").to_str().unwrap()])), 2);
    // wrong schema version
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, r#"{ "schema": 2, "scenario": "graphene3" }"#).unwrap();
    assert_eq!(code(&gla(&["run", bad.to_str().unwrap()])), 2);
    // unknown config field
    let unknown = tmp.path().join("unknown.json");
    std::fs::write(&unknown, r#"{ "schema": 1, "scenario": "graphene3", "zest": 1 }"#).unwrap();
    assert_eq!(code(&gla(&["run", unknown.to_str().unwrap()])), 2);
}

#[test]
fn bands_exports_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bands.csv");
    let res = gla(&["bands", "graphene", "--out", out.to_str().unwrap(), "--resolution", "16"]);
    assert_eq!(code(&res), 0, "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let body = std::fs::read_to_string(&out).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("kx,ky,band0,band1"));
    assert_eq!(lines.count(), 16 * 16);
    assert_eq!(code(&gla(&["bands", "kagome", "--out", out.to_str().unwrap()])), 2);
}
