//! End-to-end runs of the pipeline and the binary: artifacts, exit codes,
//! and failure surfacing in the manifest.

use std::process::Command;

use vessel_cli::config::parse_config;
use vessel_cli::runner::{run, Stages};

fn soliton_config(dir: &str) -> String {
    format!(
        r#"{{
        "vessel": {{"diagonal": {{"mu": [[0.5, 0]], "b1": [[1, 0]], "b2": [[1, 0]]}}}},
        "grid": {{"x_min": -8, "x_max": 8, "nx": 161, "t_min": 0, "t_max": 1, "nt": 21}},
        "checks": ["ode", "spectral", "tau"],
        "output": {{"dir": "{dir}"}}
    }}"#
    )
}

#[test]
fn verify_stage_emits_artifacts_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(soliton_config("unused").as_bytes()).unwrap();
    let manifest = run(&cfg, dir.path(), Stages { field: true, checks: true, oracle: false }).unwrap();
    assert!(manifest.summary_pass);
    assert!(manifest.error.is_none());
    assert_eq!(manifest.checks.len(), 3);
    for artifact in ["beta.csv", "tau.csv", "residuals.json", "manifest.json"] {
        assert!(dir.path().join(artifact).exists(), "{artifact} missing");
    }
    let beta = std::fs::read_to_string(dir.path().join("beta.csv")).unwrap();
    let mut lines = beta.lines();
    assert_eq!(lines.next().unwrap(), "x,t,re_beta,im_beta,abs_beta,valid");
    assert_eq!(beta.lines().count(), 1 + 161 * 21);
    // beta(x_min, 0) = -sech(-8); the formatted value round-trips.
    let first = lines.next().unwrap();
    let fields: Vec<&str> = first.split(',').collect();
    assert_eq!(fields[0], "-8");
    let re_beta: f64 = fields[2].parse().unwrap();
    assert!((re_beta - (-1.0 / 8.0f64.cosh())).abs() < 1e-12);
    assert_eq!(fields[5], "1");
}

#[test]
fn empty_check_list_passes_vacuously() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(soliton_config("unused").as_bytes()).unwrap();
    cfg.checks.clear();
    let manifest = run(&cfg, dir.path(), Stages { field: true, checks: true, oracle: false }).unwrap();
    assert!(manifest.summary_pass);
    assert!(manifest.checks.is_empty());
}

#[test]
fn degenerate_construction_fails_and_manifest_names_it() {
    // mu = i/2 with |b1| = |b2| makes X identically zero: the build must
    // fail and the manifest must carry the singularity.
    let text = r#"{
        "vessel": {"diagonal": {"mu": [[0, 0.5]], "b1": [[1, 0]], "b2": [[1, 0]]}},
        "grid": {"x_min": -1, "x_max": 1, "nx": 11}
    }"#;
    let cfg = parse_config(text.as_bytes()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let err = run(&cfg, dir.path(), Stages::all()).unwrap_err();
    assert!(err.to_string().contains("singular"), "{err}");
    let manifest = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("singular"), "manifest must name the singular operator");
    assert!(manifest.contains("\"summary_pass\": false"));
}

#[test]
fn binary_runs_verify_and_respects_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, soliton_config("unused")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vessel-nls"))
        .args(["verify", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .env("VESSEL_NLS_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("pass"), "{stdout}");
    assert!(dir.path().join("out/residuals.json").exists());
}

#[test]
fn binary_rejects_bad_config_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(
        &cfg_path,
        r#"{"vessel": {}, "grid": {"x_min": 0, "x_max": 1, "nx": 5}}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vessel-nls"))
        .args(["field", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("vessel"), "{stderr}");
}

#[test]
fn grid_override_changes_the_field_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, soliton_config("unused")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vessel-nls"))
        .args(["field", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .args(["--grid", "-2:2:9,0:0:1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let beta = std::fs::read_to_string(dir.path().join("out/beta.csv")).unwrap();
    assert_eq!(beta.lines().count(), 1 + 9);
}

#[test]
fn failing_check_yields_nonzero_exit_and_failed_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    // An impossible threshold forces the tau group to fail.
    let text = r#"{
        "vessel": {"diagonal": {"mu": [[0.5, 0]], "b1": [[1, 0]], "b2": [[1, 0]]}},
        "grid": {"x_min": -4, "x_max": 4, "nx": 41, "t_min": 0, "t_max": 0.5, "nt": 6},
        "checks": [{"id": "tau", "threshold": 1e-30}]
    }"#;
    std::fs::write(&cfg_path, text).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vessel-nls"))
        .args(["build-check", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success(), "impossible threshold must fail the run");
    let manifest = std::fs::read_to_string(dir.path().join("out/manifest.json")).unwrap();
    assert!(manifest.contains("\"summary_pass\": false"));
}

#[test]
fn oracle_subcommand_cross_validates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    // narrow t-range keeps the run fast; padding 4 x [-8, 8] decays fine
    let text = r#"{
        "vessel": {"diagonal": {"mu": [[0.5, 0]], "b1": [[1, 0]], "b2": [[1, 0]]}},
        "grid": {"x_min": -8, "x_max": 8, "nx": 41, "t_min": 0, "t_max": 0.1, "nt": 3},
        "oracle": {"dt": 0.001, "padding": 4.0, "nx": 1024}
    }"#;
    std::fs::write(&cfg_path, text).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vessel-nls"))
        .args(["oracle", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let oracle = std::fs::read_to_string(dir.path().join("out/oracle.csv")).unwrap();
    assert!(oracle.starts_with("t,x,re_beta,im_beta,re_oracle,im_oracle,abs_diff"));
    assert!(oracle.lines().count() > 3);
}
