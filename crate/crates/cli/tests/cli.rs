use std::path::PathBuf;
use std::process::Command;

use clustercc_core::laurent::{LaurentJson, LaurentPoly};
use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_clustercc"))
        .arg("--json")
        .args(args)
        .output()
        .expect("binary runs");
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    });
    (out.status.code().expect("exit code"), v)
}

fn poly(v: &Value) -> LaurentPoly {
    let j: LaurentJson = serde_json::from_value(v.clone()).unwrap();
    LaurentPoly::from_json(&j).unwrap()
}

#[test]
fn cc_of_simple_over_two_triangles() {
    let (code, v) = run(&[
        "cc",
        "--qp",
        &data("q.json"),
        "--ext",
        &data("qtilde.json"),
        "--rep",
        &data("s2.json"),
    ]);
    assert_eq!(code, 0);
    let want = LaurentPoly::parse(4, "x2^-1 x3 x4 + x1 x2^-1").unwrap();
    assert_eq!(poly(&v["cc"]), want);
    let want = LaurentPoly::parse(3, "x2^-1 x3 + x1 x2^-1").unwrap();
    assert_eq!(poly(&v["ccRestricted"]), want);
}

#[test]
fn both_chi_methods_agree() {
    let args = |m| ["cc", "--qp", "Q", "--rep", "R", "--method", m].map(String::from);
    let mut got = vec![];
    for m in ["fixedpoint", "pointcount"] {
        let mut a = args(m);
        a[2] = data("q.json");
        a[4] = data("rep.json");
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        let (code, v) = run(&refs);
        assert_eq!(code, 0);
        got.push(poly(&v["cc"]));
    }
    assert_eq!(got[0], got[1]);
}

#[test]
fn markov_kernel_cone_is_nontrivial() {
    let (code, v) = run(&["kernel-cone", "--matrix", &data("markov.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["trivial"], false);
    let w: Vec<String> = serde_json::from_value(v["certificate"]["vector"].clone()).unwrap();
    assert_eq!(w, ["1", "1", "1"]);
}

#[test]
fn matrix_mutation_is_an_involution() {
    let (code, v) = run(&[
        "mutate-matrix",
        "--matrix",
        &data("a3.json"),
        "--seq",
        "2,2",
    ]);
    assert_eq!(code, 0);
    let input: Value =
        serde_json::from_str(&std::fs::read_to_string(data("a3.json")).unwrap()).unwrap();
    assert_eq!(v["rows"], input["rows"]);
}

#[test]
fn built_triangulation_round_trips_through_check() {
    let (code, v) = run(&["surface-build", "--boundary", "2,1,1"]);
    assert_eq!(code, 0);
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("built_annulus.json");
    std::fs::write(&path, v["triangulation"].to_string()).unwrap();
    let (code, c) = run(&["surface-check", "--triangulation", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(c["corank"]["rank"], c["corank"]["expectedRank"]);
    assert_eq!(c["kernelCone"]["trivial"], true);
    let (code, b) = run(&["surface-b", "--triangulation", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(b["rows"], v["bMatrix"]);
}

#[test]
fn errors_are_json_with_exit_one() {
    let (code, v) = run(&["mutate-matrix", "--matrix", &data("a3.json"), "--seq", "4"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "KOutOfRange");
    assert!(v["message"].is_string());

    let bad = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("not_skew.json");
    std::fs::write(&bad, r#"{"n": 2, "m": 0, "rows": [[0, 1], [1, 0]]}"#).unwrap();
    let (code, v) = run(&["kernel-cone", "--matrix", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "NotSkewSymmetric");

    let (code, v) = run(&[
        "order-compare",
        "--matrix",
        &data("markov.json"),
        "--a",
        "1,0,0",
        "--b",
        "0,0,0",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "NotAPartialOrder");
}

#[test]
fn truncation_flag_reaches_the_qp() {
    let (code, v) = run(&[
        "--truncation",
        "5",
        "qp-mutate",
        "--qp",
        &data("qtilde.json"),
        "--k",
        "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["qp"]["p"], 5);
}

#[test]
fn verify_runs_a_small_suite() {
    let (code, v) = run(&["verify", "--reps", "5", "--max-dim", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
}
