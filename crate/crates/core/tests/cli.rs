use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use catswap::output::read_grid;

fn catswap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catswap"))
        .args(args)
        .env_remove("CATSWAP_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

const SMALL: &str = r#"{
  "scenario": "catswap_snapshots",
  "physics": {"n_qubits": 2, "nbar": 4},
  "numerics": {"fock_cutoff": 24, "dt": 0.002},
  "output": {
    "field_grid": {"q_range": [-8, 8], "p_range": [-8, 8], "resolution": [41, 41]},
    "spin_grid": {"theta": 19, "phi": 36, "lambert_radial": 11, "lambert_angular": 36}
  }
}"#;

#[test]
fn timescales_command() {
    let out = catswap(&["timescales", "--g", "1", "--nbar", "25", "--N", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        line.split(|c: char| c == '=' || c.is_whitespace())
            .filter_map(|s| s.parse().ok())
            .last()
            .unwrap()
    };
    assert!((value("t_r ") - 10.0 * std::f64::consts::PI).abs() < 1e-6);
    assert!((value("t_r1") - 2.0 * std::f64::consts::PI).abs() < 1e-6);
    assert!((value("t_c") - 2f64.sqrt()).abs() < 1e-6);
    let bad = catswap(&["timescales", "--g", "1", "--nbar", "-3", "--N", "5"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn snapshot_scenario_writes_six_grids_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        let out = catswap(&["run", &cfg, "--out", d.to_str().unwrap(), "--threads", "1"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let fa = files(&a);
    assert_eq!(fa, files(&b), "outputs differ between identical runs");
    let grids: Vec<_> = fa.keys().filter(|k| k.starts_with("snapshot_") && k.ends_with(".json")).collect();
    assert_eq!(grids.len(), 6, "{grids:?}");

    // every data file is paired with a sidecar carrying the config hash
    let manifest: serde_json::Value = serde_json::from_slice(&fa["manifest.json"]).unwrap();
    let hash = manifest["config_hash"].as_str().unwrap().to_owned();
    for name in fa.keys().filter(|k| k.ends_with(".csv")) {
        let sidecar = name.replace(".csv", ".json");
        let meta: serde_json::Value = serde_json::from_slice(&fa[&sidecar]).unwrap();
        let embedded = meta.get("config_hash").or_else(|| meta.get("run_config_hash")).unwrap();
        assert_eq!(embedded.as_str().unwrap(), hash, "{sidecar}");
    }
    let times = &manifest["resolved_times"];
    assert!(times.as_object().unwrap().len() >= 3);

    let (g, _) = read_grid(&a.join("snapshot_1_field.json")).unwrap();
    assert_eq!((g.rows(), g.cols()), (41, 41));
    assert!((g.integral() - 1.0).abs() < 1e-2);
}

#[test]
fn dry_run_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out_dir = tmp.path().join("out");
    let out = catswap(&["run", &cfg, "--out", out_dir.to_str().unwrap(), "--dry-run"]);
    assert!(out.status.success());
    assert!(!out_dir.exists() || fs::read_dir(&out_dir).unwrap().next().is_none());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["dry_run"], true);
    let t = report["resolved_times"].as_object().unwrap();
    assert!(t.values().any(|v| (v.as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12));
}

#[test]
fn config_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"scenario": "catswap_snapshots", "physics": {"nbar": 25, "colour": 1}}"#,
        r#"{"scenario": "nonsense"}"#,
        r#"{"scenario": "catswap_snapshots", "numerics": {"snapshot_times": ["t_q/2"]}}"#,
        r#"{"scenario": "catswap_snapshots", "physics": {"n_qubits": 0}}"#,
        "{ not json",
    ];
    for body in cases {
        let cfg = write_config(tmp.path(), body);
        let out = catswap(&["run", &cfg, "--dry-run"]);
        assert_eq!(out.status.code(), Some(1), "{body}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let out = catswap(&["run", tmp.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let cfg = write_config(tmp.path(), r#"{"scenario": "catswap_snapshots",
  "physics": {"nbar": 25, "colour": 1}}"#);
    let out = catswap(&["run", &cfg, "--dry-run"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn numerical_failure_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    // a cutoff far too small for the coherent state
    let cfg = write_config(
        tmp.path(),
        r#"{"scenario": "catswap_snapshots", "physics": {"n_qubits": 2, "nbar": 25}, "numerics": {"fock_cutoff": 10}}"#,
    );
    let out = catswap(&["run", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn two_frames_over_one_step() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{
  "scenario": "custom",
  "physics": {"n_qubits": 1, "nbar": 4},
  "numerics": {"fock_cutoff": 24, "dt": 0.01, "t_final": 0.01, "snapshot_times": [0]},
  "initial": {"spin": {"dicke": {"k": 0}}, "field": {"coherent": {"alpha": [2, 0]}}},
  "observables": [],
  "output": {
    "field_grid": {"q_range": [-8, 8], "p_range": [-8, 8], "resolution": [21, 21]},
    "frames": {"interval": 0.01, "spin": false}
  }
}"#,
    );
    let dir = tmp.path().join("o");
    let out = catswap(&["run", &cfg, "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = files(&dir).into_keys().filter(|k| k.starts_with("frame_") && k.ends_with(".json")).collect();
    assert_eq!(names, vec!["frame_00000_field.json", "frame_00001_field.json"]);
    let (last, _) = read_grid(&dir.join("frame_00001_field.json")).unwrap();
    assert!((last.metadata.time.unwrap() - 0.01).abs() < 1e-12);
}

#[test]
fn zero_duration_gives_only_the_initial_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{
  "scenario": "custom",
  "physics": {"n_qubits": 1, "nbar": 4},
  "numerics": {"fock_cutoff": 24, "t_final": 0, "snapshot_times": [0]},
  "initial": {"spin": {"cat": {"z": [1, 0]}}, "field": {"cat": {"alpha": [2, 0], "sign": 1}}},
  "observables": [],
  "output": {"field_grid": {"q_range": [-8, 8], "p_range": [-8, 8], "resolution": [21, 21]},
             "spin_grid": {"theta": 19, "phi": 36, "lambert_radial": 11, "lambert_angular": 36}}
}"#,
    );
    let dir = tmp.path().join("o");
    let out = catswap(&["run", &cfg, "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let grids: Vec<String> = files(&dir).into_keys().filter(|k| k.starts_with("snapshot_") && k.ends_with(".json")).collect();
    assert_eq!(grids, vec!["snapshot_0_field.json", "snapshot_0_spin.json"]);
}

#[test]
fn threads_from_environment_are_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = Command::new(env!("CARGO_BIN_EXE_catswap"))
        .args(["run", &cfg, "--dry-run"])
        .env("CATSWAP_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let help = catswap(&["--help"]);
    assert!(help.status.success());
    let unknown = catswap(&["frobnicate"]);
    assert_ne!(unknown.status.code(), Some(0));
}
