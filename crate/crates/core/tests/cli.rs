use std::fs;
use std::path::Path;
use std::process::Command;

use stepswitch::run::{config_from_manifest, preset, RunConfig};

const BIN: &str = env!("CARGO_BIN_EXE_stepswitch");

const SMALL: &str = r#"
name = "small"
mode = "exact"

[scenario]
mass = 0.067
e_q = 0.3
v0_old = 0.3
v0_new = 0.8
incidence = "left"

[[datasets]]
name = "snap"
x = { start = -20.0, end = 20.0, steps = 9 }
t = [10.0]
terms = ["1T"]

[[datasets]]
name = "grid"
mode = "grid"
x = [-5.0, 0.0, 5.0]
t = { start = 0.0, end = 1.0, steps = 11 }
grid = { length = 20.0, n = 401, dt = 0.01 }
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stepswitch(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().unwrap()
}

#[test]
fn writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("out");
    let o = stepswitch(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = fs::read_to_string(out.join("small_snap.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "# stepswitch csv v1");
    assert_eq!(
        lines.next().unwrap(),
        "x,t,re,im,density,flux,hbar_omega,method"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 18);
    assert!(rows.iter().all(|r| r.len() == 8));
    assert_eq!(rows.iter().filter(|r| r[7] == "term:1T").count(), 9);
    for r in rows.iter().filter(|r| r[7] == "exact") {
        let (re, im, rho): (f64, f64, f64) = (
            r[2].parse().unwrap(),
            r[3].parse().unwrap(),
            r[4].parse().unwrap(),
        );
        assert!((re * re + im * im - rho).abs() < 1e-12);
    }

    let grid = fs::read_to_string(out.join("small_grid.csv")).unwrap();
    let grid_rows = grid.lines().skip(2).count();
    assert_eq!(grid_rows, 3 * 11);
    assert!(grid.lines().skip(2).all(|l| l.ends_with(",grid")));

    let json = fs::read_to_string(out.join("small_manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["library_version"], env!("CARGO_PKG_VERSION"));
    assert!(v["momenta"]["q0"].is_array());
    let back = config_from_manifest(&json).unwrap();
    let mut want = RunConfig::from_toml(SMALL).unwrap();
    want.out = Some(out.clone());
    assert_eq!(back, want);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let mut csvs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let o = stepswitch(&[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        csvs.push(fs::read(out.join("small_snap.csv")).unwrap());
        csvs.push(fs::read(out.join("small_grid.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[2]);
    assert_eq!(csvs[1], csvs[3]);
}

#[test]
fn manifest_round_trips_for_every_preset() {
    for name in stepswitch::run::PRESETS {
        let c = preset(name).unwrap();
        let json = serde_json::json!({ "config": c }).to_string();
        assert_eq!(config_from_manifest(&json).unwrap(), c, "{name}");
    }
}

#[test]
fn preset_runs_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let o = stepswitch(&[
        "--preset",
        "fig2",
        "--out",
        dir.path().to_str().unwrap(),
        "--tol",
        "1e-9",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json = fs::read_to_string(dir.path().join("fig2_manifest.json")).unwrap();
    assert_eq!(config_from_manifest(&json).unwrap().tol, Some(1e-9));
    let csv = fs::read_to_string(dir.path().join("fig2_terms.csv")).unwrap();
    for label in ["term:1T", "term:2T", "term:3I"] {
        assert_eq!(csv.lines().filter(|l| l.ends_with(label)).count(), 451);
    }
}

#[test]
fn print_config_matches_preset() {
    let o = stepswitch(&["--preset", "fig7", "--print-config"]);
    assert!(o.status.success());
    let c = RunConfig::from_toml(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(c, preset("fig7").unwrap());
}

#[test]
fn validation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let empty = SMALL.replace("t = [10.0]", "t = []");
    let cfg = write_config(dir.path(), "empty.toml", &empty);
    let o = stepswitch(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty range"));

    assert_eq!(stepswitch(&["--preset", "fig9"]).status.code(), Some(1));
    assert_eq!(
        stepswitch(&["--preset", "fig4", "--mode", "grid"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        stepswitch(&["--preset", "fig4", "--mode", "sideways"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(stepswitch(&[]).status.code(), Some(1));
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        stepswitch(&["--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn numeric_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let late = SMALL
        .replace("t = [10.0]", "t = [1e9]")
        .replace("terms = [\"1T\"]", "");
    let cfg = write_config(dir.path(), "late.toml", &late);
    let o = stepswitch(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn lists_presets() {
    let o = stepswitch(&["--list-presets"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 8);
}
