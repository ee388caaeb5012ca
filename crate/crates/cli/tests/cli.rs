mod common;

use std::process::Command;

use common::{exit_code, ok, toprec};
use serde_json::Value;

fn write_curve(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn branch_points_of_shipped_curves() {
    assert_eq!(ok(&["--curve", "airy", "branchpoints"]), "a = 0 (simple, regular)\n");
    assert_eq!(
        ok(&["--curve", "gaussian", "branchpoints"]),
        "a = -1 (simple, regular)\na = 1 (simple, regular)\n"
    );
    let json: Value = serde_json::from_str(&ok(&["--curve", "lambert", "--format", "json", "branchpoints"])).unwrap();
    assert_eq!(json[0]["a"], "0");
}

#[test]
fn irrational_branch_points_exit_2_with_the_factor() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_curve(&dir, "bad.json", r#"{"label": "bad", "y": {"num": [0, 1]}, "dx": {"num": [-2, 0, 1]}}"#);
    let (e, _) = toprec(&["--curve", &path, "branchpoints"]).unwrap_err();
    assert_eq!(e.code, 2);
    assert!(e.message.contains("ζ^2 - 2"), "{}", e.message);
    assert_eq!(exit_code(&["--curve", "/nonexistent/curve.json", "branchpoints"]), 2);
}

#[test]
fn omega_records() {
    assert_eq!(ok(&["--curve", "airy", "omega", "--g", "1", "--n", "1"]), "poles [(0,4)] coeff 1/16\n");
    assert_eq!(
        ok(&["--curve", "airy", "omega", "--g", "0", "--n", "3"]),
        "poles [(0,2),(0,2),(0,2)] coeff 1/2\n"
    );
    let json: Value = serde_json::from_str(&ok(&["--curve", "airy", "--format", "json", "omega", "--g", "1", "--n", "1"])).unwrap();
    assert_eq!(json["entries"][0]["coeff"], "1/16");
    assert_eq!(json["entries"][0]["poles"][0], serde_json::json!(["0", 4]));
}

#[test]
fn unstable_and_out_of_scope_requests_exit_3() {
    let (e, _) = toprec(&["--curve", "airy", "omega", "--g", "0", "--n", "2"]).unwrap_err();
    assert_eq!(e.code, 3);
    assert!(e.message.contains("closed-form"));
    assert_eq!(exit_code(&["--curve", "gaussian", "fg", "--g", "1"]), 3);
}

#[test]
fn fg_invariances() {
    assert_eq!(ok(&["--curve", "gaussian", "fg", "--g", "2"]), "1/240\n");
    let dir = tempfile::tempdir().unwrap();
    // y = 1/ζ + x
    let shifted = write_curve(
        &dir,
        "shifted.json",
        r#"{"label": "g+x", "y": {"num": [2, 0, 1], "den": [0, 1]}, "dx": {"num": [-1, 0, 1], "den": [0, 0, 1]},
            "x": {"num": [1, 0, 1], "den": [0, 1]}}"#,
    );
    assert_eq!(ok(&["--curve", &shifted, "fg", "--g", "2"]), "1/240\n");
    let doubled = write_curve(
        &dir,
        "doubled.json",
        r#"{"label": "2g", "y": {"num": [2], "den": [0, 1]}, "dx": {"num": [-1, 0, 1], "den": [0, 0, 1]}}"#,
    );
    assert_eq!(ok(&["--curve", &doubled, "fg", "--g", "2"]), "1/960\n");
}

#[test]
fn expansions() {
    let catalan = ok(&["--curve", "gaussian", "expand", "--target", "disc", "--weight", "infinity", "--window", "0..8"]);
    let values: Vec<&str> = catalan.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(' ').nth(1).unwrap()).collect();
    assert_eq!(values, ["1", "0", "1", "0", "2", "0", "5", "0", "14"]);

    let json: Value = serde_json::from_str(&ok(&[
        "--curve", "lambert", "--format", "json", "expand", "--target", "disc", "--weight", "log", "--window", "1..6",
    ]))
    .unwrap();
    let values: Vec<&str> = json["entries"].as_array().unwrap().iter().map(|e| e["value"].as_str().unwrap()).collect();
    assert_eq!(values, ["1", "1", "3/2", "8/3", "125/24", "54/5"]);

    let raw = ok(&["--curve", "airy", "expand", "--target", "omega:1:1", "--weight", "branch", "--window", "-2..5"]);
    let nonzero: Vec<&str> = raw.lines().filter(|l| !l.starts_with('#') && !l.ends_with(" 0")).collect();
    assert_eq!(nonzero, ["[3] 1/16"]);

    let w = ok(&["--curve", "gaussian", "expand", "--target", "W:1:1", "--weight", "infinity", "--window", "4..6"]);
    assert!(w.contains("[4] 1\n") && w.contains("[6] 10\n"), "{w}");
}

#[test]
fn bad_weights_exit_5() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_curve(
        &dir,
        "weights.json",
        r#"{"label": "airy", "y": {"num": [0, 1]}, "dx": {"num": [0, 2]},
            "expansion_points": [{"name": "flat", "location": "0", "weight": {"rational": {"num": [1, 1]}}}]}"#,
    );
    assert_eq!(exit_code(&["--curve", &path, "expand", "--target", "disc", "--weight", "flat", "--window", "0..3"]), 5);
    assert_eq!(exit_code(&["--curve", &path, "expand", "--target", "disc", "--weight", "missing", "--window", "0..3"]), 5);
    assert_eq!(exit_code(&["--curve", &path, "expand", "--target", "disc", "--weight", "local:0", "--window", "0..3"]), 0);
}

#[test]
fn verify_suites() {
    for suite in ["airy", "lambert"] {
        let out = ok(&["verify", suite]);
        assert!(!out.contains("FAIL"), "{out}");
        assert!(out.lines().last().unwrap().ends_with("checks passed"));
    }
    let dir = tempfile::tempdir().unwrap();
    let path = write_curve(&dir, "cubic.json", r#"{"label": "cubic", "y": {"num": [0, 1, 1]}, "dx": {"num": [0, 2]}}"#);
    let json: Value = serde_json::from_str(&ok(&["--curve", &path, "--format", "json", "verify"])).unwrap();
    assert_eq!(json["passed"], true);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_toprec");
    let out = Command::new(bin).args(["--curve", "airy", "omega", "--g", "1", "--n", "1"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "poles [(0,4)] coeff 1/16\n");
    let out = Command::new(bin).args(["--curve", "airy", "omega", "--g", "0", "--n", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("unstable"));
}

#[test]
fn cache_settings_from_the_curve_file() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("store");
    let text = format!(
        r#"{{"label": "airy", "y": {{"num": [0, 1]}}, "dx": {{"num": [0, 2]}}, "settings": {{"cache": {:?}}}}}"#,
        cache.to_str().unwrap()
    );
    let path = write_curve(&dir, "airy.json", &text);
    let cold = ok(&["--curve", &path, "omega", "--g", "2", "--n", "1"]);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    assert_eq!(ok(&["--curve", &path, "omega", "--g", "2", "--n", "1"]), cold);
}
