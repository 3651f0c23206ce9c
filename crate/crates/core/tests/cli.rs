use std::path::{Path, PathBuf};

use projpair::cli::{dispatch, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};
use tempfile::TempDir;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> i32 {
    dispatch(std::iter::once("projpair").chain(args.iter().copied()))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn out_path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn rejected_diagonal_exits_two_with_defect() {
    let dir = TempDir::new().unwrap();
    let out = out_path(&dir, "r.json");
    let code = run(&["kadison-check", &data("seq_three_quarters.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_NEGATIVE);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["schema"], "projpair/1");
    assert_eq!(v["verdict"], "rejected");
    assert_eq!(v["defect"], 0.25);
}

#[test]
fn equal_projections_have_index_zero() {
    let dir = TempDir::new().unwrap();
    let out = out_path(&dir, "r.json");
    let q = data("q_identity.json");
    assert_eq!(run(&["esscodim", &q, &q, "--json", "--out", out.to_str().unwrap()]), EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["index"], 0);
}

#[test]
fn shifted_pair_index_and_halmos() {
    let (p, q) = (data("p_shifted.json"), data("q_identity.json"));
    assert_eq!(run(&["esscodim", &p, &q]), EXIT_OK);
    assert_eq!(run(&["halmos", &p, &q]), EXIT_OK);
}

#[test]
fn non_fredholm_pair_exits_two() {
    let dir = TempDir::new().unwrap();
    let even = write(&dir, "even.json", r#"{"kind":"tailed","block":[],"tail":{"period":[1,0]}}"#);
    let odd = write(&dir, "odd.json", r#"{"kind":"tailed","block":[],"tail":{"period":[0,1]}}"#);
    assert_eq!(run(&["esscodim", &even, &odd]), EXIT_NEGATIVE);
}

#[test]
fn finite_spectrum_fixture_is_consistent() {
    let dir = TempDir::new().unwrap();
    let out = out_path(&dir, "bj.json");
    assert_eq!(run(&["bj", &data("bj_three_quarters.json"), "--out", out.to_str().unwrap()]), EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["integer"], -1);
    assert_eq!(v["verdict"]["status"], "consistent");
}

#[test]
fn middle_eigenvalue_in_tail_is_negative() {
    let dir = TempDir::new().unwrap();
    let z = write(&dir, "z.json", r#"{"eigenvalues":[0,0.5,1],"diagonal":[0],"tail":[0.5,1]}"#);
    assert_eq!(run(&["bj", &z]), EXIT_NEGATIVE);
}

#[test]
fn build_writes_a_projection() {
    let dir = TempDir::new().unwrap();
    let out = out_path(&dir, "p.json");
    assert_eq!(run(&["kadison-build", &data("seq_admissible.json"), "--out", out.to_str().unwrap()]), EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["projection"]["kind"], "tailed");
    assert_eq!(v["integer"], 0);
    assert_eq!(run(&["kadison-build", &data("seq_three_quarters.json")]), EXIT_NEGATIVE);
}

#[test]
fn half_tail_cannot_be_built() {
    let dir = TempDir::new().unwrap();
    let seq = write(&dir, "half.json", r#"{"prefix":[],"tail":"half"}"#);
    assert_eq!(run(&["kadison-check", &seq]), EXIT_OK);
    assert_eq!(run(&["kadison-build", &seq]), EXIT_USAGE);
}

#[test]
fn tolerance_override_changes_the_verdict() {
    let dir = TempDir::new().unwrap();
    let seq = write(&dir, "s.json", r#"{"prefix":[0.9999],"tail":"zeros"}"#);
    assert_eq!(run(&["kadison-check", &seq]), EXIT_NEGATIVE);
    assert_eq!(run(&["kadison-check", &seq, "--tol-int", "1e-3"]), EXIT_OK);
    assert_eq!(run(&["--tol-rank", "1e-6", "kadison-check", &seq]), EXIT_NEGATIVE);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(run(&["esscodim", "/definitely/missing.json", "/also/missing.json"]), EXIT_USAGE);
    assert_eq!(run(&["esscodim"]), EXIT_USAGE);
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"kind":"tailed","block":[[[1,0]]],"tail":{"constant":2}}"#);
    assert_eq!(run(&["esscodim", &bad, &bad]), EXIT_USAGE);
    let dense = write(&dir, "d.json", r#"{"kind":"dense","block":[[[1,0]]]}"#);
    assert_eq!(run(&["esscodim", &dense, &data("q_identity.json")]), EXIT_USAGE);
}

#[test]
fn missing_input_leaves_no_report() {
    let dir = TempDir::new().unwrap();
    let out = out_path(&dir, "r.json");
    let code = run(&["kadison-check", "/definitely/missing.json", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(!out.exists());
}

#[test]
fn selftest_passes_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = out_path(&dir, "a.json");
    let b = out_path(&dir, "b.json");
    assert_eq!(run(&["selftest", "--trials", "100", "--seed", "7", "--out", a.to_str().unwrap()]), EXIT_OK);
    assert_eq!(run(&["selftest", "--trials", "100", "--seed", "7", "--out", b.to_str().unwrap()]), EXIT_OK);
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["all_passed"], true);
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}
