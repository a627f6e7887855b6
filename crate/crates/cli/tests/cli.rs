use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topochain"))
}

fn write_spec(dir: &Path, mu: f64) -> PathBuf {
    let path = dir.join("spec.json");
    let text = format!(r#"{{"nf": 3, "couplings": [[1, 1], [2, 2], [2, 2]], "mu": {mu}}}"#);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn winding_reports_the_root_count() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 0.0);
    let out = run(&["winding", "--spec", s(&spec)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["nu"], 3.0);
    assert_eq!(v["agreement"], true);
}

#[test]
fn csv_outputs_are_bit_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 1.0);
    for (cmd, extra) in [("scf", vec!["--nu", "1", "--length", "80"]), ("mzm", vec!["--length", "40"]), ("spectrum", vec![])] {
        let a = dir.path().join(format!("{cmd}_a.csv"));
        let b = dir.path().join(format!("{cmd}_b.csv"));
        for path in [&a, &b] {
            let mut args = vec![cmd, "--spec", s(&spec), "--out", s(path)];
            args.extend(&extra);
            let out = run(&args);
            assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{cmd}");
    }
}

#[test]
fn every_csv_starts_with_provenance_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 1.0);
    let csv = dir.path().join("g.csv");
    let out = run(&["--seed", "7", "correlators", "--spec", s(&spec), "--length", "20", "--out", s(&csv)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let prov = lines.next().unwrap();
    assert!(prov.starts_with("# topochain "), "{prov}");
    assert!(prov.contains("spec_sha256="));
    assert!(prov.contains("\"seed\":7"));
    assert_eq!(lines.next(), Some("r,G"));
    assert_eq!(lines.count(), 39);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 1.0);
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"tol_band": 1e-8, "lgird": "10:20:10"}"#).unwrap();
    let out = run(&["--config", s(&cfg), "winding", "--spec", s(&spec)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("lgird"));
}

#[test]
fn missing_output_directory_fails_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 1.0);
    let bad = dir.path().join("nowhere").join("x.csv");
    let out = run(&["spectrum", "--spec", s(&spec), "--out", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));
}

#[test]
fn oracle_passes_at_small_length() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 0.0);
    let out = run(&["oracle", "--spec", s(&spec), "--length", "8", "--nu", "3"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    for name in ["duality", "correlators", "scf", "qfi"] {
        assert!(stdout.contains(&format!("{name}: pass")), "{stdout}");
    }
}

#[test]
fn gnuplot_script_sits_next_to_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 1.0);
    let csv = dir.path().join("modes.csv");
    let out = run(&["mzm", "--spec", s(&spec), "--length", "30", "--out", s(&csv), "--emit-gnuplot"]);
    assert!(out.status.success());
    let gp = std::fs::read_to_string(dir.path().join("modes.gp")).unwrap();
    assert!(gp.contains("modes.csv"));
}

#[test]
fn reproduce_fig1_writes_tables_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["reproduce", "--target", "fig1", "--out-dir", s(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig1_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    for csv in summary["csv"].as_array().unwrap() {
        assert!(dir.path().join(csv.as_str().unwrap()).is_file(), "{csv}");
    }
}

#[test]
fn unknown_reproduce_target_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["reproduce", "--target", "fig9", "--out-dir", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}
