use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn demo(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../demos");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noisyor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn probs(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn query_two_node() {
    let v = stdout_json(&run(&["query", &demo("two_node.json"), "-e", "X=true", "-t", "A"]));
    assert_eq!(probs(&v["A"]), vec![0.0, 1.0]);
    assert!(v.get("X").is_none());
}

#[test]
fn query_without_targets_reports_all() {
    let v = stdout_json(&run(&["query", &demo("two_node.json")]));
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["A", "X"]);
    assert_eq!(probs(&v["X"]), vec![0.85, 0.15]);
}

#[test]
fn query_errors() {
    let out = run(&["query", &demo("two_node.json"), "-e", "Xtrue"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["query", &demo("two_node.json"), "-e", "Q=true"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["query", &demo("two_node.json"), "-e", "X=maybe"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["query", &demo("two_node.json"), "-e", "A=false", "-e", "X=true"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("impossible evidence"));
}

#[test]
fn parse_errors_carry_position() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "bad.json",
        "{\n  \"variables\": [\n    {\"name\": \"A\" \"states\": []}\n  ]\n}\n",
    );
    let out = run(&["query", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    let out = run(&["query", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compile_is_idempotent_and_transparent() {
    let dir = TempDir::new().unwrap();
    for name in ["two_node.json", "severity.json"] {
        let once = run(&["compile", &demo(name)]);
        assert!(once.status.success());
        let first = write(&dir, "once.json", &String::from_utf8(once.stdout.clone()).unwrap());
        let twice = run(&["compile", &first]);
        assert_eq!(once.stdout, twice.stdout);

        let raw = run(&["query", &demo(name)]);
        let compiled = run(&["query", &first]);
        assert_eq!(raw.stdout, compiled.stdout);
    }
}

#[test]
fn compile_single_node_and_budget() {
    let out = stdout_json(&run(&["compile", &demo("severity.json"), "--node", "Alert"]));
    assert_eq!(out["nodes"][2]["backing"]["cpt"].as_array().unwrap().len(), 18);
    assert_eq!(
        run(&["compile", &demo("severity.json"), "--node", "Nope"])
            .status
            .code(),
        Some(1)
    );
    let out = run(&["compile", &demo("severity.json"), "--budget", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn zero_inhibitors_compile_to_indicator() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "det.json",
        r#"{
          "variables": [
            {"name": "A", "states": ["0", "1", "2"]},
            {"name": "B", "states": ["0", "1"]},
            {"name": "S", "states": ["0", "1", "2", "3"]}
          ],
          "nodes": [
            {"variable": "A", "backing": {"cpt": [0.2, 0.3, 0.5]}},
            {"variable": "B", "backing": {"cpt": [0.5, 0.5]}},
            {"variable": "S", "parents": ["A", "B"], "backing": {"noisy_gate": {
              "function": {"kind": "add"}, "inhibitors": [[0, 0, 0], [0, 0]]}}}
          ]
        }"#,
    );
    let out = stdout_json(&run(&["compile", &path]));
    let cpt = probs(&out["nodes"][2]["backing"]["cpt"]);
    assert_eq!(cpt.len(), 24);
    assert!(cpt.iter().all(|&p| p == 0.0 || p == 1.0));
    // A=2, B=1 -> S=3
    assert_eq!(cpt[(2 * 2 + 1) * 4 + 3], 1.0);
}

#[test]
fn reliability_modes() {
    let v = stdout_json(&run(&["reliability", &demo("series.json")]));
    assert_eq!(v["connectivity"].as_f64(), Some(0.72));
    let v = stdout_json(&run(&["reliability", &demo("diamond.json"), "--mode", "paths"]));
    assert_eq!(probs(&v["paths"]), vec![0.5625, 0.375, 0.0625]);
    let v = stdout_json(&run(&["reliability", &demo("demo_graph.json"), "--mode", "paths"]));
    assert_eq!(probs(&v["paths"]).len(), 5);
    let out = run(&[
        "reliability",
        &demo("demo_graph.json"),
        "--mode",
        "paths",
        "--max-states",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reliability_edge_cases() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "perfect.json",
        r#"{"graph": {"links": [
            {"from": "A", "to": "B", "failure": 0.0}, {"from": "A", "to": "C", "failure": 0.0},
            {"from": "B", "to": "D", "failure": 0.0}, {"from": "C", "to": "D", "failure": 0.0}],
            "source": "A", "target": "D"}}"#,
    );
    let v = stdout_json(&run(&["reliability", &path, "--mode", "paths"]));
    assert_eq!(probs(&v["paths"]), vec![0.0, 0.0, 1.0]);
    let v = stdout_json(&run(&["reliability", &path, "--source", "B", "--target", "C"]));
    assert_eq!(v["connectivity"].as_f64(), Some(0.0));
    let v = stdout_json(&run(&[
        "reliability",
        &demo("diamond.json"),
        "--source",
        "B",
        "--source",
        "C",
    ]));
    assert_eq!(v["connectivity"].as_f64(), Some(0.75));
}

#[test]
fn diagnose_inverter() {
    let v = stdout_json(&run(&[
        "diagnose",
        &demo("inverter.json"),
        "-e",
        "A=true",
        "-e",
        "G=true",
        "-t",
        "G_f",
    ]));
    assert_eq!(probs(&v["G_f"]), vec![0.0, 1.0]);
    let v = stdout_json(&run(&["diagnose", &demo("inverter.json"), "-t", "G_f"]));
    assert_eq!(probs(&v["G_f"]), vec![0.9, 0.1]);
}

#[test]
fn diagnose_ignores_observed_input_priors() {
    let text = fs::read_to_string(demo("demo_circuit.json")).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["circuit"]["input_marginals"] = serde_json::json!({"A": [0.2, 0.8], "B": [0.9, 0.1], "C": [0.5, 0.5]});
    let dir = TempDir::new().unwrap();
    let skewed = write(&dir, "skewed.json", &doc.to_string());
    let args = ["-e", "A=true", "-e", "B=true", "-e", "C=false", "-e", "F=false"];
    let base = run(&[&["diagnose", &demo("demo_circuit.json")][..], &args].concat());
    let other = run(&[&["diagnose", skewed.as_str()][..], &args].concat());
    assert!(base.status.success());
    assert_eq!(base.stdout, other.stdout);
}

#[test]
fn verify_demos_and_determinism() {
    for name in [
        "two_node.json",
        "severity.json",
        "series.json",
        "diamond.json",
        "demo_graph.json",
        "demo_circuit.json",
        "inverter.json",
    ] {
        let out = run(&["verify", &demo(name), "--trials", "3"]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
    let a = run(&["verify", "--trials", "20", "--seed", "42"]);
    let b = run(&["verify", "--trials", "20", "--seed", "42"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_names_corrupted_node() {
    let text = fs::read_to_string(demo("two_node.json")).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["nodes"][1]["backing"] = serde_json::json!({"cpt": [1.0, 0.0, 0.6, 0.5]});
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "corrupt.json", &doc.to_string());
    let out = run(&["verify", &path, "--trials", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("FAIL") && report.contains("`X`"), "{report}");
}
