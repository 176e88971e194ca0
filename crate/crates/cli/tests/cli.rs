use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

fn predim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_predim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const TRIANGLE: &str = r#"{"signature":{"E":2},"elements":[0,1,2],"instances":{"E":[[0,1],[0,2],[1,2]]}}"#;

#[test]
fn dim_on_a_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "tri.json", TRIANGLE);
    let out = predim(&["dim", "--alpha", "2/3", "--in", &tri]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["delta"], "1");
    assert_eq!(v["d"], "0");
    assert_eq!(v["strong"], true);

    let out = predim(&["dim", "--alpha", "2/3", "--in", &tri, "--base", "0,1", "--oracle"]);
    let v = json(&out);
    assert_eq!(v["d"], "1");
    assert_eq!(v["minimizer"], serde_json::json!([0, 1, 2]));
    assert_eq!(v["strong"], false);
}

#[test]
fn icl_closes_over_the_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "tri.json", TRIANGLE);
    for extra in [&[][..], &["--oracle"][..]] {
        let mut args = vec!["icl", "--alpha", "2/3", "--in", &tri, "--base", "0,1"];
        args.extend_from_slice(extra);
        let v = json(&predim(&args));
        assert_eq!(v["closure"], serde_json::json!([0, 1, 2]));
    }
}

#[test]
fn seed_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seed.json");
    let dot = dir.path().join("seed.dot");
    let out = predim(&[
        "seed",
        "--alpha",
        "5/11",
        "--out",
        path.to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["certificate"]["beta"], "-5/11");
    assert_eq!(v["certificate"]["membership"]["status"], "verified");
    assert_eq!(v["report"]["member"], true);

    let text = std::fs::read_to_string(&path).unwrap();
    let s = predim::io::from_json(&text).unwrap();
    assert_eq!(predim::io::to_json(&s) + "\n", text);
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("graph"));
}

#[test]
fn construct_cn_budget_exit_code() {
    let out = predim(&["construct", "cn", "--alpha", "1/2", "--n", "9", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["error"]["kind"], "budget");
}

#[test]
fn construct_cn_succeeds() {
    let out = predim(&["construct", "cn", "--alpha", "5/11", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["primitive"], true);
    assert_eq!(v["delta_in_range"], true);
}

#[test]
fn dense_find_lattice_gap() {
    let out = predim(&["construct", "dense-find", "--alpha", "1/2", "--lo", "-2/5", "--hi", "-3/10"]);
    assert_eq!(out.status.code(), Some(1));
    let out = predim(&["construct", "dense-find", "--alpha", "5/11", "--lo", "-1/2", "--hi", "-2/5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["certificate"]["beta"], "-5/11");
}

#[test]
fn precision_and_usage_exit_codes() {
    let out = predim(&["seed", "--alpha-interval", "1/4", "1/2"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["error"]["kind"], "precision");
    assert_eq!(predim(&["sample", "--n", "5", "--alpha", "1/2"]).status.code(), Some(2));
    assert_eq!(predim(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(predim(&["seed"]).status.code(), Some(2));
    let out = predim(&["sample", "--n", "4", "--alpha", "1/2", "--coeff", "3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_is_reproducible() {
    let args = ["sample", "--n", "200", "--alpha", "7/10", "--coeff", "2", "--seed", "7", "--census", "K3"];
    let a = predim(&args);
    let b = predim(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(v["count"].is_u64());
    assert!(v["expected"].as_f64().unwrap() > 0.0);

    let empty = json(&predim(&["sample", "--n", "30", "--alpha", "1/2", "--coeff", "0", "--seed", "1"]));
    assert_eq!(empty["edges"], 0);
    let full = json(&predim(&["sample", "--n", "4", "--alpha", "1/2", "--coeff", "2", "--seed", "1", "--census", "K4"]));
    assert_eq!(full["edges"], 6);
    assert_eq!(full["count"], 1);
}

#[test]
fn check_suites_pass() {
    for suite in ["axioms", "identities", "closure", "amalgamation"] {
        let out = predim(&["check", suite, "--seed", "3", "--trials", "25", "--max-size", "9"]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        assert_eq!(json(&out)["passed"], 25);
    }
}

#[test]
fn witnesses() {
    let out = predim(&["witness", "rank0", "--alpha", "1/2", "--blocks", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["ok"], true);
    assert_eq!(v["d_c_over_x_value"], "1");

    // blocks glued over {x, y, c} do not keep {x} closed; reported as failed
    let out = predim(&["witness", "rank0", "--alpha", "5/11", "--blocks", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["d_c_over_xy_value"], "0");

    let out = predim(&["witness", "pairs", "--alpha", "1/2", "--blocks", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn generic_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = predim(&[
            "generic", "--alpha", "5/8", "--steps", "60", "--max-ext", "3", "--seed", "42", "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        (out.stdout, std::fs::read(path).unwrap())
    };
    let (a, fa) = run("a.json");
    let (b, fb) = run("b.json");
    assert_eq!(a, b);
    assert_eq!(fa, fb);
}

fn graph_json(n: u32, edges: &[(u32, u32)]) -> String {
    let s = predim::Structure::graph(n, edges).unwrap();
    predim::io::to_json(&s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn oracle_flag_agrees_with_engine(
        n in 2u32..9,
        raw in proptest::collection::vec((0u32..9, 0u32..9), 0..16),
        base_mask in 0u32..512,
        num in 1i32..10,
    ) {
        let edges: Vec<(u32, u32)> = raw.into_iter().map(|(a, b)| (a % n, b % n)).filter(|(a, b)| a != b).collect();
        let dir = tempfile::tempdir().unwrap();
        let file = write(dir.path(), "g.json", &graph_json(n, &edges));
        let alpha = format!("{num}/10");
        let base: Vec<String> = (0..n).filter(|i| base_mask >> i & 1 == 1).map(|i| i.to_string()).collect();
        let base = base.join(",");
        let engine = json(&predim(&["dim", "--alpha", &alpha, "--in", &file, "--base", &base]));
        let oracle = json(&predim(&["dim", "--alpha", &alpha, "--in", &file, "--base", &base, "--oracle"]));
        prop_assert_eq!(&engine["d"], &oracle["d"]);
        prop_assert_eq!(&engine["minimizer"], &oracle["minimizer"]);
    }
}
