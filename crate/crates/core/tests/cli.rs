use std::fs;
use std::process::Command;

fn gfdim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gfdim")).args(args).output().unwrap()
}

#[test]
fn empty_check_list_is_silent() {
    let out = gfdim(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_and_compute_errors() {
    assert_eq!(gfdim(&["dim", "--eps0", "2"]).status.code(), Some(1));
    assert_eq!(gfdim(&["verify", "--theorems", "nonsense"]).status.code(), Some(1));
    assert_eq!(gfdim(&["dim", "--mode", "mc"]).status.code(), Some(1));
    // two-sided shift carries no lower expansion constant
    let out = gfdim(&["verify", "--theorems", "entropy_bounds"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failures_set_exit_code() {
    // with the expectation cleared, the q = 1 counterexample counts as a failure
    let out = gfdim(&["verify", "--theorems", "expansive_q1,monotone", "--expect-fail", "monotone"]);
    assert_eq!(out.status.code(), Some(12));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"measure": {"kind": "bernoulli", "p": [0.7, 0.3]}, "q": [2], "eps_count": 6}"#).unwrap();
    let out = dir.path().join("dim.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_gfdim"))
        .args(["dim", "--config", cfg.to_str().unwrap(), "--format", "csv", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# gfdim "));
    assert!(lines.next().unwrap().contains("\"eps_count\":6"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 7);
    assert!(text.contains("\nq,eps,value,kind\n"));
}

#[test]
fn zoo_lists_systems() {
    let out = gfdim(&["zoo"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let systems = doc["systems"].as_array().unwrap();
    assert_eq!(systems.len(), 5);
    let cat = systems.iter().find(|s| s["name"] == "toral_automorphism").unwrap();
    let l1 = cat["lyapunov"][0].as_f64().unwrap().exp();
    assert!((l1 - 2.618034).abs() < 1e-6);
}
