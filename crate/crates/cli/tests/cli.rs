use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn somorse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_somorse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn critical_points_n3_sorted_by_index() {
    let out = somorse(&["critical-points", "--n", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let indices: Vec<u64> = rows.iter().map(|r| r["index"].as_u64().unwrap()).collect();
    assert_eq!(indices, vec![0, 1, 2, 3]);
    assert_eq!(rows[0]["eps"], serde_json::json!([1, -1, -1]));
    assert_eq!(rows[0]["value"], serde_json::json!(-4.0));
    assert_eq!(
        rows[1]["hessian_diagonal"]["(1,2)"],
        serde_json::json!(-1.0)
    );
}

#[test]
fn critical_points_n1_single_row() {
    let out = somorse(&["critical-points", "--n", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(text.lines().nth(1).unwrap(), "1,0,1,");
}

#[test]
fn rejects_non_increasing_costs() {
    let out = somorse(&["critical-points", "--n", "3", "--c", "1,1,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("cost vector must be strictly increasing")
    );
    let out = somorse(&["critical-points", "--n", "3", "--c", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = somorse(&["critical-points", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn polynomials_n5_perfect() {
    let out = somorse(&["polynomials", "--n", "5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let expected = serde_json::json!([1, 1, 1, 2, 2, 2, 2, 2, 1, 1, 1]);
    assert_eq!(v["morse"], expected);
    assert_eq!(v["poincare_basis"], expected);
    assert_eq!(v["poincare_product"], expected);
    assert_eq!(v["remainder"], serde_json::json!({"quotient": []}));
    assert_eq!(v["verdict"], "PERFECT");
    assert_eq!(v["perfect"], true);
}

#[test]
fn polynomials_n2_table() {
    let out = somorse(&["polynomials", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.ends_with(" 1 + t")).count(),
        3,
        "{text}"
    );
    assert!(text.contains("PERFECT"));
}

#[test]
fn polynomials_n12_fast() {
    let t = Instant::now();
    let out = somorse(&["polynomials", "--n", "12", "--format", "json"]);
    assert!(t.elapsed() < Duration::from_secs(10));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["count_at_one"], 2048);
}

#[test]
fn verify_passes_at_n4() {
    let out = somorse(&[
        "verify",
        "--n",
        "4",
        "--samples",
        "100",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["passed"], true);
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 4);
    assert_eq!(suites[0]["name"], "gradient-fd");
    assert!(suites[0]["max_residual"].as_f64().unwrap() < 1e-7);
}

#[test]
fn verify_trivial_group() {
    let out = somorse(&["verify", "--n", "1", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_reports_unreachable_tolerance() {
    let out = somorse(&["verify", "--n", "4", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(4));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL flow-classification"), "{text}");
}

#[test]
fn flow_limits_are_critical_points() {
    let out = somorse(&[
        "flow",
        "--n",
        "3",
        "--samples",
        "500",
        "--seed",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let allowed = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 500);
    for r in records {
        let eps: Vec<i64> = r["classified_pattern"]
            .as_array()
            .expect("classified")
            .iter()
            .map(|x| x.as_i64().unwrap())
            .collect();
        assert!(allowed.iter().any(|a| a[..] == eps[..]), "{eps:?}");
    }
    assert_eq!(v["summary"]["samples"], 500);
}

#[test]
fn flow_two_dimensional_reaches_minimum() {
    let out = somorse(&["flow", "--n", "2", "--samples", "100", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["summary"]["at_minimum"].as_u64().unwrap() >= 99);
}

#[test]
fn flow_rejects_zero_samples() {
    let out = somorse(&["flow", "--n", "4", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flow_start_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[[1.0, 0.0], [0.0, -1.0]]").unwrap();
    let out = somorse(&["flow", "--n", "2", "--start", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let good = dir.path().join("good.json");
    std::fs::write(&good, "[[0.0, -1.0], [1.0, 0.0]]").unwrap();
    let out = somorse(&[
        "flow",
        "--n",
        "2",
        "--start",
        good.to_str().unwrap(),
        "--format",
        "json",
        "--trajectory",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let rec = &v["records"][0];
    assert_eq!(rec["classified_pattern"], serde_json::json!([-1, -1]));
    let traj: Vec<f64> = rec["trajectory_values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(traj.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn same_seed_same_bytes() {
    let args = [
        "flow",
        "--n",
        "4",
        "--samples",
        "50",
        "--seed",
        "11",
        "--format",
        "json",
    ];
    let a = somorse(&args);
    let b = somorse(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("points.json");
    let out = somorse(&[
        "critical-points",
        "--n",
        "4",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
}
