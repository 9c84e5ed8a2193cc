use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cergm"))
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn config(name: &str) -> PathBuf {
    crate_dir().join("configs").join(name)
}

fn run(command: &str, config: &Path, extra: &[&str]) -> Output {
    bin()
        .arg(command)
        .arg("--config")
        .arg(config)
        .args(extra)
        .env_remove("CERGM_MAX_N")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> PathBuf {
    let path = dir.path().join("run.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn schema(name: &str) -> jsonschema::Validator {
    let text = std::fs::read_to_string(crate_dir().join("schema").join(name)).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).expect("schema compiles")
}

fn assert_valid(validator: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}\n{doc:#}");
}

#[test]
fn compare_uniform_window() {
    let doc = json_of(&run("compare", &config("compare.json"), &[]));
    let result = &doc["result"];
    let exact = result["exact"].as_f64().unwrap();
    assert!((exact - 5005f64.ln() / 36.0).abs() < 1e-14, "{exact}");
    let variational = result["variational"]["value"].as_f64().unwrap();
    assert!((variational - 0.5 * 2f64.ln()).abs() < 1e-12);
    let gap = result["gaps"]["variational_minus_exact"].as_f64().unwrap();
    assert!((gap - (variational - exact)).abs() < 1e-15);
    assert!(result["ti"].is_null());
}

#[test]
fn compare_csv_row() {
    let out = run("compare", &config("compare.json"), &["--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,e,t,exact,variational,argmax_x,ti,ti_std_error,gap_variational_exact,gap_ti_exact"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "6");
    assert_eq!(row[6], "");
    assert!(lines.next().is_none());
}

#[test]
fn small_kappa_is_a_config_error() {
    let out = run(
        "variational",
        &config("variational.json"),
        &["--set", "kappa=4"],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = run("bounds", &config("bounds.json"), &["--set", "kappa=8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_window_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        r#"{"model": {"n": 3, "motifs": ["edge"], "zetas": [0.0], "e": 0.9, "t": 0.001}}"#,
    );
    for command in ["exact", "sample", "integrate", "compare"] {
        let out = run(command, &path, &[]);
        assert_eq!(out.status.code(), Some(3), "{command}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains("infeasible"), "{stderr}");
    }
}

#[test]
fn malformed_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        "{",
        r#"{"model": {"n": 4, "zetas": [0.1]}, "surprise": 1}"#,
        r#"{"model": {"n": 4, "zetas": [0.1, 0.2]}}"#,
        r#"{"model": {"n": 4, "zetas": [0.1], "e": 0.5}}"#,
        r#"{"command": "bounds", "model": {"n": 4, "zetas": [0.1], "e": 0.5, "t": 0.1}}"#,
    ] {
        let path = write_config(&dir, body);
        let out = run("exact", &path, &[]);
        assert_eq!(out.status.code(), Some(2), "{body}");
    }
    let out = run("exact", &dir.path().join("missing.json"), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn size_gate_and_env_override() {
    let out = run("exact", &config("exact.json"), &["--set", "model.n=9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["exact", "--config"])
        .arg(config("exact.json"))
        .env("CERGM_MAX_N", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["exact", "--config"])
        .arg(config("exact.json"))
        .args(["--set", "max_n=6"])
        .env("CERGM_MAX_N", "5")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn overrides_reach_the_model() {
    let doc = json_of(&run(
        "exact",
        &config("exact.json"),
        &[
            "--set",
            "model.n=4",
            "--set",
            "model.zetas=[0,0]",
            "--set",
            "model.t=1",
        ],
    ));
    assert_eq!(doc["model"]["n"], 4);
    let psi = doc["result"]["psi"].as_f64().unwrap();
    assert!((psi - 6.0 * 2f64.ln() / 16.0).abs() < 1e-14);
    assert_eq!(doc["result"]["counts"]["in_window"], 64);
}

#[test]
fn every_result_matches_the_schema() {
    let validator = schema("result.schema.json");
    let fast = ["--set", "chain.sweeps=300", "--set", "chain.burn_in=50"];
    for command in [
        "exact",
        "variational",
        "bounds",
        "sample",
        "integrate",
        "compare",
        "scan",
    ] {
        let doc = json_of(&run(command, &config(&format!("{command}.json")), &fast));
        assert_eq!(doc["command"], command);
        assert!(doc["runtime_ms"].is_null());
        assert_valid(&validator, &doc);
    }
    let doc = json_of(&run("exact", &config("exact.json"), &["--timing"]));
    assert!(doc["runtime_ms"].is_u64());
    assert_valid(&validator, &doc);
}

#[test]
fn shipped_configs_match_the_config_schema() {
    let validator = schema("config.schema.json");
    for entry in std::fs::read_dir(crate_dir().join("configs")).unwrap() {
        let path = entry.unwrap().path();
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_valid(&validator, &doc);
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let read_run = |command: &str, format: &str, seed: &str, tag: &str| {
        let path = dir.path().join(format!("{command}-{tag}.{format}"));
        let out = run(
            command,
            &config(&format!("{command}.json")),
            &[
                "--set",
                "chain.sweeps=400",
                "--set",
                "chain.burn_in=50",
                "--format",
                format,
                "--seed",
                seed,
                "--output",
                path.to_str().unwrap(),
            ],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out.stdout.is_empty());
        std::fs::read(path).unwrap()
    };
    for (command, format) in [("sample", "csv"), ("sample", "json"), ("integrate", "json")] {
        let a = read_run(command, format, "99", "a");
        let b = read_run(command, format, "99", "b");
        assert!(!a.is_empty());
        assert_eq!(a, b, "{command} {format}");
        let c = read_run(command, format, "100", "c");
        assert_ne!(a, c, "{command} {format}");
    }
}

#[test]
fn scan_keeps_grid_order_and_flags_empty_windows() {
    let doc = json_of(&run(
        "scan",
        &config("scan.json"),
        &[
            "--set",
            "model.n=3",
            "--set",
            "model.t=0.01",
            "--threads",
            "2",
        ],
    ));
    let rows = doc["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    let values: Vec<f64> = rows.iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]));
    // N = 3 reaches densities 2k/9 only.
    for r in rows {
        let e = r["e"].as_f64().unwrap();
        let feasible = (0..=3).any(|k| ((2 * k) as f64 / 9.0 - e).abs() <= 0.01);
        assert_eq!(r["feasible"], feasible, "{r}");
        assert_eq!(r["exact"].is_null(), !feasible);
    }
}
