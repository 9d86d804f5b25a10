//! End-to-end tests of the binary: exit codes, JSON shapes, determinism,
//! and pipe composability.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_moment-schur"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn binary");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().expect("wait")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn indices_subcommand() {
    let out = run(&["indices"], r#"["1/1","1/1","1/1","1/1"]"#);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["indices"], serde_json::json!([1]));
    assert_eq!(v["nu"], serde_json::json!([1]));
    assert_eq!(v["mu"], serde_json::json!([1]));
    assert_eq!(v["regular"], serde_json::json!(true));
}

#[test]
fn indices_accepts_wrapped_input() {
    let out = run(&["indices"], r#"{"moments":["1/1","0/1","1/1","0/1"]}"#);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["regular"], serde_json::json!(false));
    assert_eq!(v["regular_witness"], serde_json::json!(1));
}

#[test]
fn schur_subcommand() {
    let out = run(&["schur", "--parity", "even"], r#"["1/1","1/1"]"#);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["levels"], serde_json::json!(1));
    assert_eq!(v["atoms"][0]["m"], serde_json::json!(["1/1"]));
    assert_eq!(v["atoms"][0]["l"], serde_json::json!(["1/1"]));
    assert_eq!(v["tail_contract"], serde_json::json!("o(1)"));
}

#[test]
fn resolvent_subcommand() {
    let out = run(&["resolvent"], r#"["1/1","1/1"]"#);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["det"], serde_json::json!("1"));
    assert_eq!(v["w21"], serde_json::json!(["0/1", "-1/1"]));
}

#[test]
fn expand_roundtrips_moments() {
    let out = run(
        &["expand", "--parity", "even"],
        r#"["2/1","3/1","5/1","9/1"]"#,
    );
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(
        v["coeffs"],
        serde_json::json!(["-2/1", "-3/1", "-5/1", "-9/1"])
    );
}

#[test]
fn malformed_json_exits_2_with_location() {
    let out = run(&["indices"], "[\"1/1\",");
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let v = stderr_json(&out);
    assert_eq!(v["error"]["kind"], serde_json::json!("parse"));
    assert!(v["error"]["line"].is_number());
    assert!(v["error"]["column"].is_number());
}

#[test]
fn domain_error_exits_1_with_structured_payload() {
    let out = run(&["schur"], r#"["0/1","0/1","0/1"]"#);
    assert_eq!(out.status.code(), Some(1));
    let v = stderr_json(&out);
    assert_eq!(v["error"]["kind"], serde_json::json!("no_normal_index"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let input = r#"["2/1","3/1","5/1","9/1"]"#;
    let a = run(&["schur", "--parity", "even"], input);
    let b = run(&["schur", "--parity", "even"], input);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn decompose_key_output_feeds_schur() {
    let tensor = r#"{
        "n": 2,
        "entries": [
            {"idx": [0, 0], "val": "1/1"},
            {"idx": [1, 1], "val": "1/2"}
        ],
        "max_degree": 1
    }"#;
    let first = run(&["decompose", "--key", "0,0"], tensor);
    assert!(first.status.success());
    let values = String::from_utf8(first.stdout.clone()).unwrap();
    // The selected diagonal is a plain moment-sequence JSON.
    let second = run(&["schur", "--parity", "even"], &values);
    assert!(
        second.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&second.stderr)
    );
    let v = stdout_json(&second);
    assert_eq!(v["levels"], serde_json::json!(1));
}

#[test]
fn decompose_lists_all_diagonals() {
    let tensor = r#"{
        "n": 2,
        "entries": [
            {"idx": [1, 0], "val": "1/1"},
            {"idx": [2, 2], "val": "5/1"}
        ],
        "max_degree": 2
    }"#;
    let out = run(&["decompose"], tensor);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let diagonals = v["diagonals"].as_array().unwrap();
    assert_eq!(diagonals.len(), 2);
    assert_eq!(diagonals[0]["key"], serde_json::json!([0, 0]));
    assert_eq!(diagonals[1]["key"], serde_json::json!([1, 0]));
}

#[test]
fn solve_collects_failures_without_stopping() {
    let tensor = r#"{
        "n": 2,
        "entries": [
            {"idx": [0, 0], "val": "1/1"},
            {"idx": [1, 1], "val": "1/1"},
            {"idx": [2, 1], "val": "3/1"}
        ],
        "max_degree": 2
    }"#;
    let out = run(&["solve", "--parity", "odd"], tensor);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!(!v["solutions"].as_array().unwrap().is_empty());
}

#[test]
fn indeterminacy_subcommand() {
    let out = run(
        &["indeterminacy", "--depth", "2"],
        r#"["2/1","3/1","5/1","9/1"]"#,
    );
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["sum_m"], serde_json::json!("5/1"));
    assert_eq!(v["sum_l"], serde_json::json!("3/2"));
    assert_eq!(v["l_positive"], serde_json::json!(true));
    assert_eq!(v["verdict"], serde_json::json!("exhausted"));
}

#[test]
fn verify_measure_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("measure.json");
    std::fs::write(
        &path,
        r#"{"n":1,"atoms":[{"node":["1/1"],"weight":"1/1"},{"node":["2/1"],"weight":"1/1"}]}"#,
    )
    .unwrap();
    let out = run(&["verify", "--measure", path.to_str().unwrap()], "");
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["agreement"], serde_json::json!(true));
    assert_eq!(v["levels"], serde_json::json!(2));
    assert_eq!(v["coefficients_checked"], serde_json::json!(4));
}
