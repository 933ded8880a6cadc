use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const M6: &str = r#"{"field": {"p": 2, "a": 1, "m": 6}, "blocks": [
    {"geometric": {"lambda_degree": 6, "t": 2}},
    {"geometric": {"lambda_degree": 6, "t": 2}},
    {"geometric": {"lambda_degree": 6, "t": 2}}]}"#;

fn rankdec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankdec"))
        .args(args)
        .env_remove("RANKDEC_CAP")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn build_writes_a_canonical_code_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "m6.json", M6);
    let code = dir.path().join("m6.code.json");
    let out = rankdec(&["--format", "json", "build", &spec, "-o", code.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["type"], serde_json::json!([2, 2, 2]));
    assert_eq!((v["n"].as_u64(), v["k"].as_u64()), (Some(6), Some(3)));
    assert_eq!(v["mrd"], false);

    let out = rankdec(&["--format", "csv", "wdist", code.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "weight,count\n0,1\n1,0\n2,441\n3,2646\n4,35280\n5,127008\n6,96768\n");
}

#[test]
fn single_block_is_mrd_and_dependent_block_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "one.json", r#"{"field": {"p": 3, "a": 1, "m": 3}, "blocks": [{"entries": [1, 3]}]}"#);
    let v = json(&rankdec(&["--format", "json", "build", &good]));
    assert_eq!((v["k"].as_u64(), v["mrd"].as_bool()), (Some(1), Some(true)));

    let bad = write(dir.path(), "bad.json", r#"{"field": {"p": 2, "a": 1, "m": 4}, "blocks": [{"entries": [1, 2, 3]}]}"#);
    let out = rankdec(&["build", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank weight"));

    let broken = write(dir.path(), "broken.json", "{\"field\": {\"p\": 2,\n \"a\": }");
    let out = rankdec(&["build", &broken]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn formula_and_enumeration_agree() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "m6.json", M6);
    let out = rankdec(&["--format", "json", "wdist", "--method", "both", &spec]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["agree"], true);
    assert_eq!(v["formula"]["formula_count"], 441);
    assert_eq!(v["messages"], 262144);
}

#[test]
fn formula_only_for_m7() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "m7.json",
        r#"{"field": {"p": 2, "a": 1, "m": 7}, "blocks": [
            {"geometric": {"lambda_degree": 7, "t": 3}},
            {"geometric": {"lambda_degree": 7, "t": 3}},
            {"geometric": {"lambda_degree": 7, "t": 3}}]}"#,
    );
    let v = json(&rankdec(&["--format", "json", "--cap", "1", "wdist", "--method", "formula", &spec]));
    assert_eq!(v["formula"]["formula_count"], 889);
    assert_eq!(v["formula"]["j_matrix"].as_array().unwrap().len(), 3);
}

#[test]
fn cap_exceeded_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "m6.json", M6);
    assert_eq!(rankdec(&["--cap", "1000", "wdist", &spec]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_rankdec"))
        .args(["wdist", &spec])
        .env("RANKDEC_CAP", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(rankdec(&["nonsense"]).status.code(), Some(1));
    assert_eq!(rankdec(&["verify", "nonsense"]).status.code(), Some(1));
    assert_eq!(rankdec(&["--threads", "0", "bounds", "--q", "2", "--m", "6", "--nk", "2", "--ell", "1"]).status.code(), Some(1));
    assert_eq!(rankdec(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_is_deterministic_under_seed() {
    let args = ["--format", "json", "--seed", "7", "verify", "duality", "--trials", "40"];
    let a = rankdec(&args);
    let b = rankdec(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["seed"], 7);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["failures"] == 0));
}

#[test]
fn failing_check_raises_the_alarm() {
    let out = rankdec(&["--format", "json", "verify", "characterization", "--trials", "12"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    let exact = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == rankdec::suites::MINIMAL_EXACT).unwrap();
    assert!(exact["failures"].as_u64().unwrap() > 0);
}

#[test]
fn reproduce_extremal_and_lowerbound() {
    let v = json(&rankdec(&["--format", "json", "reproduce", "prop45"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["rows"][0]["computed"], serde_json::json!([1, 0, 75, 0, 180]));
    let out = rankdec(&["reproduce", "lowerbound"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("reproduced"));
}

#[test]
fn bounds_table() {
    let out = rankdec(&["--format", "csv", "bounds", "--q", "2", "--m", "7", "--nk", "3", "--ell", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1), Some("2,7,3,2,381,34671,889"));
}
