//! End-to-end checks of the `rodwheel` binary: exit codes, CSV output and
//! report text, driven through the real executable.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn rodwheel(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rodwheel"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

#[test]
fn simulate_free_run_exits_zero_with_801_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = rodwheel(
        &[
            "simulate",
            scenario("paper_free.toml").to_str().unwrap(),
            "--out",
            "free.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("wrote 801 rows"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("free.csv")).unwrap();
    assert_eq!(csv.lines().count(), 802); // header + samples
    assert!(csv.starts_with("t,c1,c2,phi,theta,psi,beta,dphi,dtheta,dpsi,dbeta,u,E,lambda1,lambda2\n"));
}

#[test]
fn simulate_case1_tracks_target_speed() {
    let dir = tempfile::tempdir().unwrap();
    let out = rodwheel(
        &[
            "simulate",
            scenario("case1.toml").to_str().unwrap(),
            "--out",
            "case1.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("case1.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    let dphi: f64 = last.split(',').nth(7).unwrap().parse().unwrap();
    assert!((dphi - 2.0).abs() < 0.05, "final dphi = {dphi}");
}

#[test]
fn simulate_perturbed_case1_exits_fall_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = rodwheel(
        &[
            "simulate",
            scenario("case1_perturbed.toml").to_str().unwrap(),
            "--out",
            "fall.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FALL"), "{stdout}");
}

#[test]
fn missing_scenario_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = rodwheel(&["simulate", "no_such_file.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = rodwheel(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = rodwheel(
        &[
            "sweep",
            scenario("paper_free.toml").to_str().unwrap(),
            "--param",
            "mass",
            "--values",
            "1,2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_scenario_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "initial_state = [1.0, 2.0]\n").unwrap();
    let out = rodwheel(&["simulate", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("10 entries"));
}

#[test]
fn audit_default_scenario_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = rodwheel(
        &["audit", scenario("paper_free.toml").to_str().unwrap()],
        dir.path(),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("all checks passed"), "{stdout}");
    assert!(stdout.contains("oracle assembly agreement"));
    assert!(stdout.contains("energy drift"));
    assert!(stdout.contains("constraint residual"));
}

#[test]
fn audit_controlled_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    // Controlled runs gate on the work balance instead of raw drift.
    let out = rodwheel(&["audit", scenario("case2.toml").to_str().unwrap()], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("work-balance residual"));
    assert!(!stdout.contains("energy drift"), "{stdout}");

    // A run that ends in a fall has an under-resolved final phase; the
    // audit reports it and exits nonzero.
    let out = rodwheel(
        &["audit", scenario("case1_perturbed.toml").to_str().unwrap()],
        dir.path(),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(1), "{stdout}");
    assert!(stdout.contains("ended in a fall"), "{stdout}");
}

#[test]
fn sweep_theta0_finds_instability_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let out = rodwheel(
        &[
            "sweep",
            scenario("case1.toml").to_str().unwrap(),
            "--param",
            "theta0",
            "--values",
            "0,1e-12,1e-6,0.01",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let fell: Vec<bool> = stdout
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap() == "true")
        .collect();
    assert_eq!(fell, vec![false, true, true, true], "{stdout}");
}

#[test]
fn sweep_dt_shows_second_order_drift() {
    // Drift shrinks roughly 4x per halving on the uncontrolled run. The
    // sweep itself reports fall/θ summaries; drift is checked through the
    // audit tolerances at two steps.
    let dir = tempfile::tempdir().unwrap();
    let out = rodwheel(
        &[
            "sweep",
            scenario("paper_free.toml").to_str().unwrap(),
            "--param",
            "dt",
            "--values",
            "0.01,0.005",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 3, "{stdout}");
    for line in stdout.lines().skip(1) {
        assert!(line.contains("false"), "{stdout}");
    }
}
