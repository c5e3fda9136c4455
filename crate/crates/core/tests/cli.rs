//! End-to-end runs of the `singular-schrodinger` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_singular-schrodinger"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

const DELTA: &str = r#"{"m": 1, "Q": {"breakpoints": [0.0], "pieces": [[[[0.0, 0.0]]], [[[-2.0, 0.0]]]]}, "s": {"breakpoints": [], "pieces": [[[[0.0, 0.0]]]]}}"#;

#[test]
fn minimal_config_solves_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"potential": {"m": 1}, "solve": {"lambda": [-1, 0], "samples": 11}}"#);
    let out_dir = dir.path().join("out");
    let o = run(&["solve", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--format", "both"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out_dir, "solve.json");
    assert_eq!(r["failed"], false);
    assert_eq!(r["potential"]["definition"]["m"], 1);
    let end = &r["result"]["endpoint"]["state"][0];
    assert!((end[0].as_f64().unwrap() - 5f64.cosh()).abs() < 1e-6);
    let csv = std::fs::read_to_string(out_dir.join("solve.csv")).unwrap();
    assert!(csv.starts_with("x,"));
    assert_eq!(csv.lines().count(), 12);
    assert!(out_dir.join("metadata.json").exists());
}

#[test]
fn zero_dimension_is_a_validation_error_naming_m() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"potential": {"m": 0}}"#);
    let o = run(&["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("m:"));
}

#[test]
fn unknown_keys_fail_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", "{\n  \"potential\": {\"m\": 1},\n  \"spectrum\": {\"radius\": 4, \"radios\": 3}\n}");
    let o = run(&["spectrum", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("radios"), "{err}");
}

#[test]
fn potential_file_is_resolved_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "delta.json", DELTA);
    let cfg = write(dir.path(), "c.json", r#"{"potential_file": "delta.json", "spectrum": {"radius": 10, "window": [-2, -0.5], "radius_step": 0}}"#);
    let out_dir = dir.path().join("out");
    let o = run(&["spectrum", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out_dir, "spectrum.json");
    let ev = r["result"]["eigenvalues"].as_array().unwrap();
    assert_eq!(ev.len(), 1);
    assert!((ev[0]["lambda"][0].as_f64().unwrap() + 1.0).abs() < 1e-6);
    assert_eq!(ev[0]["oracle"]["agrees"], true);

    let missing = write(dir.path(), "m.json", r#"{"potential_file": "nowhere.json"}"#);
    assert_eq!(run(&["solve", "--config", &missing]).status.code(), Some(2));
}

#[test]
fn spectrum_on_corpus_delta_via_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--corpus", "delta-2", "--radius", "10", "--window", "-2,-0.5", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path(), "spectrum.json");
    let lambda = r["result"]["eigenvalues"][0]["lambda"][0].as_f64().unwrap();
    assert!((lambda + 1.0).abs() < 1e-6);
    assert_eq!(r["potential"]["corpus"], "delta-2");
}

#[test]
fn complex_window_and_bad_window() {
    let o = run(&["spectrum", "--corpus", "complex-delta", "--radius", "6", "--window", "-2,-0.05,-1,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(run(&["spectrum", "--window", "1,2,3"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--corpus", "no-such-entry"]).status.code(), Some(2));
}

#[test]
fn blow_up_is_a_numerical_failure_with_marker() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"potential": {"m": 1}, "solve": {"lambda": [-10000, 0], "interval": [-10, 10]}}"#);
    let o = run(&["solve", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let r = report(dir.path(), "solve.json");
    assert_eq!(r["failed"], true);
    assert!(r["error"].as_str().unwrap().contains("blew up"));
}

#[test]
fn reports_are_byte_identical_for_a_fixed_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&["scan", "--corpus", "matrix-delta", "--seed", "11", "--out", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let ra = std::fs::read(a.path().join("scan.json")).unwrap();
    let rb = std::fs::read(b.path().join("scan.json")).unwrap();
    assert_eq!(ra, rb);
    let other = tempfile::tempdir().unwrap();
    run(&["scan", "--corpus", "matrix-delta", "--seed", "12", "--out", other.path().to_str().unwrap()]);
    assert_ne!(ra, std::fs::read(other.path().join("scan.json")).unwrap());
    let seq = tempfile::tempdir().unwrap();
    run(&["scan", "--corpus", "matrix-delta", "--seed", "11", "--sequential", "--out", seq.path().to_str().unwrap()]);
    assert_eq!(ra, std::fs::read(seq.path().join("scan.json")).unwrap());
}

#[test]
fn every_command_runs_on_the_corpus() {
    for cmd in ["form", "green-check", "kernel-growth", "semigroup", "corpus"] {
        let o = run(&[cmd, "--corpus", "delta+1"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stdout.is_empty());
    }
    let table = String::from_utf8(run(&["corpus"]).stdout).unwrap();
    for name in ["free", "free2", "delta-2", "delta+1", "matrix-delta", "step-well", "miura-tanh", "complex-delta", "nonsym"] {
        assert!(table.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn tolerance_flag_must_be_positive() {
    assert_eq!(run(&["solve", "--tol", "-1"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    run(&["solve", "--tol", "1e-6", "--out", dir.path().to_str().unwrap()]);
    let r = report(dir.path(), "solve.json");
    assert_eq!(r["parameters"]["tolerances"]["rtol"], 1e-6);
    assert_eq!(r["parameters"]["tolerances"]["atol"], 1e-8);
}

#[test]
fn verify_all_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify-all", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(dir.path(), "verify-all.json");
    assert_eq!(r["result"]["passed"], true);
    assert_eq!(r["result"]["criteria"].as_array().unwrap().len(), 12);
}

#[test]
fn readme_config_examples_parse() {
    use singular_schrodinger::cli::ExperimentConfig;
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap();
    assert!(readme.contains(DELTA));
    let blocks: Vec<&str> = readme
        .split("```json\n")
        .skip(1)
        .map(|b| b.split("```").next().unwrap())
        .collect();
    assert_eq!(blocks.len(), 3);
    let delta = ExperimentConfig::from_json(&format!("{{\"potential\": {}}}", blocks[0].trim())).unwrap();
    delta.validate().unwrap();
    for b in &blocks[1..] {
        let cfg = ExperimentConfig::from_json(b).unwrap();
        cfg.validate().unwrap();
    }
    let full = ExperimentConfig::from_json(blocks[2]).unwrap();
    let defaults = ExperimentConfig::from_json(blocks[1]).unwrap();
    assert_eq!(full.tolerances, defaults.tolerances);
    assert_eq!(full.green, defaults.green);
    assert_eq!(full.kernel_growth, defaults.kernel_growth);
    assert_eq!(full.semigroup, defaults.semigroup);
    assert_eq!(full.solve, defaults.solve);
}
