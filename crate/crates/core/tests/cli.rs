use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn lattice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lattice")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn machine(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "machine"]);
    let out = lattice(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).expect("json output")
}

#[test]
fn jacobi_table_shows_m3_coefficients() {
    let out = lattice(&["jacobi", "--family", "uniform", "--r", "2", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("3/4"));
    assert!(text.contains("0.866025403784"));
    assert!(text.contains("1.732050807569"));
}

#[test]
fn jacobi_machine_output_is_exact() {
    let v = machine(&["jacobi", "--family", "boolean", "--n", "3"]);
    assert_eq!(v["beta_sq"], serde_json::json!(["3/4", "1", "3/4"]));
    assert_eq!(v["layers"], serde_json::json!([1, 3, 3, 1]));
}

#[test]
fn moments_agree_on_b2() {
    let v = machine(&["moments", "--family", "boolean", "--n", "2", "--max-k", "4"]);
    assert_eq!(v["full"], serde_json::json!(["1", "0", "1/2", "0", "1/2"]));
    assert_eq!(v["agree"], Value::Bool(true));
}

#[test]
fn out_file_matches_machine_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.json");
    let out = lattice(&["spectrum", "--family", "boolean", "--n", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written, machine(&["spectrum", "--family", "boolean", "--n", "1"]));
}

#[test]
fn non_geometric_document_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hexagon.json");
    let hexagon = r#"{"elements":[{"id":0},{"id":1},{"id":2},{"id":3},{"id":4},{"id":5}],
        "covers":[[0,1],[0,2],[1,3],[2,4],[3,5],[4,5]]}"#;
    fs::write(&path, hexagon).unwrap();
    let out = lattice(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("semimodular"));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(lattice(&["jacobi", "--family", "nope"]).status.code(), Some(2));
    assert_eq!(lattice(&["jacobi", "--family", "boolean"]).status.code(), Some(2));
    assert_eq!(lattice(&["validate", "/nonexistent/lattice.json"]).status.code(), Some(2));
}

#[test]
fn convolve_two_half_point_measures() {
    let dir = tempfile::tempdir().unwrap();
    let half = dir.path().join("b1.json");
    fs::write(&half, r#"{"atoms": [[-0.5, 0.5], [0.5, 0.5]]}"#).unwrap();
    let h = half.to_str().unwrap();
    let v = machine(&["convolve", "--left", h, "--right", h]);
    let atoms: Vec<(f64, f64)> = serde_json::from_value(v["atoms"].clone()).unwrap();
    assert_eq!(atoms, vec![(-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)]);
}

#[test]
fn product_check_passes_for_m3_times_b1() {
    let out = lattice(&["product-check", "--left", "uniform:2:3", "--right", "boolean:1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn verify_projective_plane() {
    let out = lattice(&["verify", "--family", "projective", "--r", "3", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn resolvent_of_b2() {
    let v = machine(&["resolvent", "--family", "boolean", "--n", "2"]);
    assert_eq!(v["numerator"], serde_json::json!(["1", "0", "-1/2"]));
    assert_eq!(v["denominator"], serde_json::json!(["1", "0", "-1"]));
}
