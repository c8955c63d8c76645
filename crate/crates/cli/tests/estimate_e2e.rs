//! End-to-end estimation on external snapshot files, including the CLI
//! binary and its exit codes.

use std::process::Command;

use rgmusic::datagen::{synthesize, NoiseModel, SourceConfig};
use rgmusic::rng::{role, stream};
use rgmusic::snapshot_io::{write_csv as write_snapshot_csv, write_rspk1};
use rgmusic_cli::config::{ExperimentConfig, Scenario};
use rgmusic_cli::runners::{run_estimate, RunError};

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(name)
}

fn synth_file(path: &std::path::Path, p_db: f64, seed: u64) {
    let p = 10f64.powf(p_db / 10.0);
    let sources = SourceConfig::new(
        vec![10f64.to_radians(), 12f64.to_radians()],
        vec![p, p],
        0.5,
    )
    .unwrap();
    let mut rng = stream(seed, 0, role::NOISE);
    let (y, _) = synthesize(&sources, NoiseModel::StudentT { beta: 100.0 }, 200, 1000, &mut rng)
        .unwrap();
    write_rspk1(path, y.data()).unwrap();
}

fn estimate_cfg(out: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::for_scenario(Scenario::Estimate);
    cfg.out_dir = tmp(out);
    // localize near the sources to keep the grid small for the test
    cfg.grid_start_deg = 0.0;
    cfg.grid_stop_deg = 30.0;
    cfg
}

#[test]
fn recovers_angles_and_powers_from_rspk_file() {
    let input = tmp("rg_e2e.rspk");
    synth_file(&input, 0.0, 9001);
    let cfg = estimate_cfg("rg_e2e_out");
    let art = run_estimate(&cfg, &input).unwrap();
    assert_eq!(art.n_antennas, 200);
    assert_eq!(art.n_samples, 1000);
    assert_eq!(art.report.detected.len(), 2, "summary:\n{}", art.summary);
    for d in &art.report.detected {
        assert!(
            (d.power - 1.0).abs() < 0.15,
            "power estimate {} off unit",
            d.power
        );
    }
    assert_eq!(art.angles_deg.len(), 2);
    assert!((art.angles_deg[0] - 10.0).abs() < 0.3, "{:?}", art.angles_deg);
    assert!((art.angles_deg[1] - 12.0).abs() < 0.3, "{:?}", art.angles_deg);
    // artifacts on disk
    for f in ["spikes.csv", "localization.csv", "angles.csv"] {
        assert!(cfg.out_dir.join(f).is_file(), "{f} missing");
    }
}

#[test]
fn csv_snapshots_round_trip_through_estimate() {
    let p = 10f64.powf(0.5);
    let sources = SourceConfig::new(vec![0.2], vec![p], 0.5).unwrap();
    let mut rng = stream(9002, 0, role::NOISE);
    let (y, _) = synthesize(&sources, NoiseModel::Gaussian, 30, 300, &mut rng).unwrap();
    let input = tmp("rg_e2e.csv");
    write_snapshot_csv(&input, y.data()).unwrap();
    let cfg = estimate_cfg("rg_e2e_csv_out");
    let art = run_estimate(&cfg, &input).unwrap();
    assert_eq!(art.n_antennas, 30);
    assert_eq!(art.n_samples, 300);
    assert_eq!(art.report.detected.len(), 1);
}

#[test]
fn truncated_file_is_a_config_error() {
    let input = tmp("rg_e2e_trunc.rspk");
    synth_file(&input, 0.0, 9003);
    let bytes = std::fs::read(&input).unwrap();
    std::fs::write(&input, &bytes[..bytes.len() / 2]).unwrap();
    let cfg = estimate_cfg("rg_e2e_trunc_out");
    match run_estimate(&cfg, &input) {
        Err(e @ RunError::Config(_)) => {
            let msg = e.to_string();
            assert!(msg.contains("truncated"), "message: {msg}");
            assert!(msg.contains("expected"), "message: {msg}");
            assert_eq!(e.exit_code(), 2);
        }
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn cli_binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_rgmusic");

    // config error: unknown key
    let bad_cfg = tmp("rg_e2e_bad.cfg");
    std::fs::write(&bad_cfg, "definitely_not_a_key = 1\n").unwrap();
    let out = Command::new(bin)
        .args(["oneshot", "--config"])
        .arg(&bad_cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // estimate without input: config error
    let out = Command::new(bin).arg("estimate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // a healthy tiny oneshot run exits 0
    let cfg = tmp("rg_e2e_ok.cfg");
    std::fs::write(
        &cfg,
        "n_antennas = 8\nn_samples = 48\nmeasure_draws = 2000\n",
    )
    .unwrap();
    let out_dir = tmp("rg_e2e_cli_out");
    let out = Command::new(bin)
        .args(["oneshot", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("localization.csv").is_file());
}
