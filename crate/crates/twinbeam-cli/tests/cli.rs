//! End-to-end checks of the `twinbeam` binary: exit codes, file layout,
//! and byte-level reproducibility across thread counts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twinbeam"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twinbeam-cli-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// Small-but-real scenario parameters so the whole suite stays fast.
const SMALL: &[&str] = &["--modes", "24", "--realizations", "60", "--lag-max", "12"];

fn small_config_file(dir: &Path) -> PathBuf {
    let path = dir.join("config.toml");
    fs::write(
        &path,
        "seed = 3\n\
         [grid]\n\
         window = 24.0\n\
         step = 0.05\n",
    )
    .unwrap();
    path
}

#[test]
fn hbt_writes_curves_and_summary() {
    let dir = temp_dir("hbt");
    let cfg = small_config_file(&dir);
    let out = bin()
        .args(["hbt", "--out-dir"])
        .arg(dir.join("out"))
        .args(["--config"])
        .arg(&cfg)
        .args(SMALL)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(dir.join("out/hbt_baseline.csv")).unwrap();
    assert!(csv.starts_with("lag,g2,stderr\n"));
    assert!(dir.join("out/hbt_dispersed.csv").exists());

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("out/hbt_summary.json")).unwrap())
            .unwrap();
    // The summary echoes the resolved config, flag overrides included.
    assert_eq!(summary["config"]["seed"], 3);
    assert_eq!(summary["config"]["modes"], 24);
    assert_eq!(summary["config"]["grid"]["window"], 24.0);
    assert!(summary["baseline"]["peak_ratio"].as_f64().unwrap() > 1.5);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let dir = temp_dir("repro");
    let cfg = small_config_file(&dir);
    for (sub, threads) in [("a", "1"), ("b", "4")] {
        let out = bin()
            .args(["hbt", "--out-dir"])
            .arg(dir.join(sub))
            .args(["--config"])
            .arg(&cfg)
            .args(SMALL)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["hbt_baseline.csv", "hbt_dispersed.csv", "hbt_summary.json"] {
        let a = fs::read(dir.join("a").join(name)).unwrap();
        let b = fs::read(dir.join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs across thread counts");
    }
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn zero_realizations_exits_with_config_error() {
    let dir = temp_dir("zero");
    let out = bin()
        .args(["hbt", "--realizations", "0", "--out-dir"])
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("realizations"), "diagnostic: {stderr}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_config_key_exits_with_config_error() {
    let dir = temp_dir("unknown");
    let cfg = dir.join("bad.toml");
    fs::write(&cfg, "seed = 1\nwavelength = 780\n").unwrap();
    let out = bin()
        .args(["quantum", "--out-dir"])
        .arg(dir.join("out"))
        .args(["--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wavelength"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn aliasing_guard_exits_with_numerical_code() {
    let dir = temp_dir("alias");
    let cfg = dir.join("coarse.toml");
    // step * max offset = 1.0 * 4 > pi: aliased synthesis.
    fs::write(&cfg, "[grid]\nwindow = 40.0\nstep = 1.0\n").unwrap();
    let out = bin()
        .args(["fields", "--out-dir"])
        .arg(dir.join("out"))
        .args(["--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn pulse_window_guard_exits_with_numerical_code() {
    let dir = temp_dir("spill");
    let cfg = dir.join("pulse.toml");
    fs::write(
        &cfg,
        "[media]\nd1 = 5.0\nd2 = -5.0\n[pulse]\nwindow = 30.0\n",
    )
    .unwrap();
    let out = bin()
        .args(["pulse", "--modes", "128", "--out-dir"])
        .arg(dir.join("out"))
        .args(["--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn quantum_and_fields_scenarios_write_expected_files() {
    let dir = temp_dir("misc");
    let out = bin()
        .args(["quantum", "--modes", "64", "--out-dir"])
        .arg(dir.join("q"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let profile = fs::read_to_string(dir.join("q/quantum_profile.csv")).unwrap();
    assert!(profile.starts_with("lag,g2,stderr\n"));

    let out = bin()
        .args(["fields", "--modes", "32", "--out-dir"])
        .arg(dir.join("f"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let fields = fs::read_to_string(dir.join("f/fields.csv")).unwrap();
    assert!(fields.starts_with("t,i1,i2,i1_dispersed,i2_dispersed\n"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn negative_dispersion_flags_parse() {
    let dir = temp_dir("negd");
    let out = bin()
        .args(["quantum", "--modes", "64", "--d1", "4", "--d2", "-4", "--out-dir"])
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("out/quantum_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["config"]["media"]["d2"], -4.0);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_scenario_writes_table_and_fit() {
    let dir = temp_dir("sweep");
    let cfg = dir.join("sweep.toml");
    fs::write(
        &cfg,
        "[grid]\nwindow = 20.0\nstep = 0.05\n\
         [sweep]\nd_max = 0.4\npoints = 3\nrealizations = 80\nmodes = 16\n",
    )
    .unwrap();
    let out = bin()
        .args(["sweep", "--out-dir"])
        .arg(dir.join("out"))
        .args(["--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(dir.join("out/sweep_points.csv")).unwrap();
    assert!(table.starts_with("d1,d2,deficit,stderr\n"));
    assert_eq!(table.lines().count(), 1 + 9);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("out/sweep_summary.json")).unwrap())
            .unwrap();
    assert!(summary["fit"]["c1"].is_number());
    fs::remove_dir_all(&dir).ok();
}
