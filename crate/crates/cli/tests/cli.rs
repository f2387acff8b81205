use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orientcount")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

const K4: &str = "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";

#[test]
fn count_k4_triangle_free() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.txt", K4);
    let o = run(&["count", "--graph", &g, "--family", "c3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "24");
    let o = run(&["count", "--graph", &g, "--family", "c3", "--method", "oracle"]);
    assert_eq!(stdout(&o).trim(), "24");
    let o = run(&["count", "--graph", &g, "--method", "acyclic"]);
    assert_eq!(stdout(&o).trim(), "24");
}

#[test]
fn count_json_reports_method() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.txt", K4);
    let o = run(&["count", "--graph", &g, "--family", "transitive:3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count_decimal_string"], "24");
    assert_eq!(v["method"], "restricted");
}

#[test]
fn triangle_exponent_at_sample_point() {
    let o = run(&["bounds", "exponent", "--statement", "triangles", "--n", "1e6", "--p", "1e-2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("100000000"), "{out}");
    assert!(out.contains("regime: p >= n^(-1/2)"), "{out}");
}

#[test]
fn gen_without_seed_is_usage_error() {
    let o = run(&["gen", "--n", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["experiment", "--family", "c3", "--n", "8", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_inputs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.txt", K4);
    assert_eq!(run(&["count", "--graph", &g, "--family", "bogus"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.txt", "3 1\n0 0\n");
    assert_eq!(run(&["count", "--graph", &bad, "--family", "c3"]).status.code(), Some(2));
    assert_eq!(run(&["nosuchcommand"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--n", "5", "--p", "1.5", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn gen_is_seed_deterministic() {
    let a = run(&["gen", "--n", "30", "--p", "0.3", "--seed", "9"]);
    let b = run(&["gen", "--n", "30", "--p", "0.3", "--seed", "9"]);
    let c = run(&["gen", "--n", "30", "--p", "0.3", "--seed", "10"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn witness_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let w = dir.path().join("w.json");
    let (g, w) = (g.to_str().unwrap(), w.to_str().unwrap());
    assert!(run(&["gen", "--n", "10", "--p", "0.5", "--seed", "4", "-o", g]).status.success());
    assert!(run(&["witness", "build", "--graph", g, "--family", "c3", "--a", "3", "-o", w]).status.success());
    let o = run(&["witness", "verify", "--graph", g, "--witness", w]);
    assert!(o.status.success(), "{}", stdout(&o));

    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(w).unwrap()).unwrap();
    v["claimed_log2_lower"] = serde_json::json!(v["claimed_log2_lower"].as_f64().unwrap() + 1.0);
    std::fs::write(w, v.to_string()).unwrap();
    assert_ne!(run(&["witness", "verify", "--graph", g, "--witness", w]).status.code(), Some(0));
}

#[test]
fn certificate_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.txt", K4);
    let d = write(dir.path(), "o.txt", "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let c = dir.path().join("c.json");
    let c = c.to_str().unwrap();
    assert!(run(&["certify", "build", "--graph", &g, "--orientation", &d, "--family", "c3", "-o", c]).status.success());
    let o = run(&["certify", "verify", "--graph", &g, "--orientation", &d, "--certificate", c, "--unique-budget", "10000"]);
    assert!(o.status.success(), "{}", stdout(&o));

    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(c).unwrap()).unwrap();
    v["S"].as_array_mut().unwrap().pop();
    std::fs::write(c, v.to_string()).unwrap();
    let o = run(&["certify", "verify", "--graph", &g, "--orientation", &d, "--certificate", c]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("stuck"), "{}", stdout(&o));
}

#[test]
fn cyclic_orientation_is_rejected_by_certify() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k3.txt", "3 3\n0 1\n1 2\n0 2\n");
    let d = write(dir.path(), "o.txt", "3 3\n0 1\n1 2\n2 0\n");
    let o = run(&["certify", "build", "--graph", &g, "--orientation", &d, "--family", "c3"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn experiment_csv_independent_of_threads() {
    let args = ["experiment", "--family", "c3", "--n", "9,11", "--p", "0.4,0.3", "--samples", "4", "--seed", "21"];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let eight = run(&[&args[..], &["--threads", "8"]].concat());
    assert!(one.status.success());
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, eight.stdout);
    let out = stdout(&one);
    assert!(out.starts_with("# orientcount experiment csv v1"));
    assert_eq!(out.lines().count(), 2 + 16);
}

#[test]
fn csv_format_rejected_where_meaningless() {
    let o = run(&["bounds", "exponent", "--statement", "triangles", "--n", "100", "--p", "0.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn density_exponent_exact_rationals() {
    let o = run(&["bounds", "exponent", "--statement", "transitive:4", "--density-exponent", "8/5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "b(8/5) = 8/5");
    let o = run(&["bounds", "exponent", "--statement", "transitive:4", "--density-exponent", "2"]);
    assert_eq!(stdout(&o).trim(), "b(2) = 1");
}
