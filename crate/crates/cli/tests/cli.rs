//! End-to-end tests of the binary: exit codes, determinism, and the CSV
//! contracts.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pfaffwalk"))
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn zero_trajectories_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"trajectories": 0, "window": {"lo": -5, "hi": 5}, "t": 0.5}"#,
    );
    let out = bin().args(["simulate", "--config", &cfg]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invalid_window_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", r#"{"window": {"lo": 5, "hi": -5}}"#);
    let out = bin().args(["kernel", "--config", &cfg]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupted_tolerance_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"tolerances": {"pfaffian": -1.0}}"#,
    );
    let out = bin().args(["verify", "pfaffian", "--config", &cfg]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_variant_is_a_config_error() {
    let out = bin().args(["simulate", "--variant", "sideways"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fixed_seed_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sim.json",
        r#"{"window": {"lo": -20, "hi": 20}, "t": 2.0, "trajectories": 500,
            "seed": 77, "theta": 1.0, "points": [[0], [-3], [4]]}"#,
    );
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let status = bin()
            .args(["simulate", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "same seed must produce byte-identical CSV");
}

#[test]
fn kernel_grid_at_time_zero_is_the_initial_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "kernel.json",
        r#"{"variant": "bulk", "theta": 1.0, "t": 0.0,
            "window": {"lo": -4, "hi": 4}, "initial": {"type": "full"}}"#,
    );
    let out = bin().args(["kernel", "--config", &cfg]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(2) {
        let fields: Vec<&str> = line.split(',').collect();
        let t: f64 = fields[0].parse().unwrap();
        assert_eq!(t, 0.0);
        let y: i64 = fields[1].parse().unwrap();
        let z: i64 = fields[2].parse().unwrap();
        let k: f64 = fields[3].parse().unwrap();
        // sigma(y,z) = (-1)^(z-y) under full occupancy at theta = 1.
        let expect = if (z - y) % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(k, expect, "K({y},{z})");
    }
}

#[test]
fn figure_reproduces_the_intensity_anchors() {
    let out = bin().args(["figure", "--t", "0.25", "--theta", "0"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines().skip(1);
    let header = lines.next().unwrap();
    assert_eq!(header, "y,rho_absorbing,rho_reflecting,rho_bulk");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    let first = &rows[0];
    assert_eq!(first[1], 0.0, "absorbing density must vanish exactly at 0");
    assert!((first[2] - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-10);
    let last = rows.last().unwrap();
    let bulk = 2.0 / (2.0 * std::f64::consts::PI).sqrt();
    assert!((last[1] - bulk).abs() < 1e-6, "absorbing at 10 sqrt(t): {}", last[1]);
    assert!((last[2] - bulk).abs() < 1e-6, "reflecting at 10 sqrt(t): {}", last[2]);
}

#[test]
fn gap_emits_table_with_fitted_rate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "gap.json",
        r#"{"variant": "bulk", "theta": 1.0, "t": 0.25,
            "lengths": [1.0, 1.5, 2.0], "nodes": 320}"#,
    );
    let out = bin().args(["gap", "--config", &cfg]).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 4);
        let p: f64 = fields[1].parse().unwrap();
        assert!(p > 0.0 && p < 1.0);
        let rate: f64 = fields[3].parse().unwrap();
        assert!(rate > 0.0);
    }
}

#[test]
fn simulate_estimates_match_kernel_predictions() {
    // Small bulk run: MC intensity within 3.5 sigma of the Pfaffian
    // prediction computed in-process.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sim.json",
        r#"{"variant": "bulk", "theta": 1.0, "t": 4.0,
            "window": {"lo": -40, "hi": 40}, "trajectories": 20000,
            "seed": 5, "points": [[0], [1, 5]]}"#,
    );
    let out = bin().args(["simulate", "--config", &cfg]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(2).map(|l| l.split(',').collect()).collect();

    use pfaffwalk::kernel::{assemble_matrix_kernel, solve_scalar_kernel, SolveOptions};
    use pfaffwalk::lattice::{BoundaryMode, Configuration, RateProfile, Window};
    let w = Window::new(-40, 40).unwrap();
    let eta0 = Configuration::full(w, BoundaryMode::Truncated).unwrap();
    let rates = RateProfile::homogeneous(1.0, 1.0).unwrap();
    let k = solve_scalar_kernel(&eta0, &rates, 4.0, &SolveOptions::default()).unwrap();
    let mk = assemble_matrix_kernel(k);
    let expectations = [
        pfaffwalk::kernel::predict_correlation(&mk, &[0]).unwrap(),
        pfaffwalk::kernel::predict_correlation(&mk, &[1, 5]).unwrap(),
    ];
    for (row, expect) in rows.iter().zip(expectations) {
        let mean: f64 = row[2].parse().unwrap();
        let stderr: f64 = row[3].parse().unwrap();
        assert!(
            (mean - expect).abs() < 3.5 * stderr.max(2e-4),
            "MC {mean} +- {stderr} vs prediction {expect}"
        );
    }
}
