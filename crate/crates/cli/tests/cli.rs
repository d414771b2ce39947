use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn acfg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acfg")).args(args).env_remove("ACFG_LOG").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn construct(dir: &Path, name: &str, rounds: &str, seed: &str) -> (Output, PathBuf) {
    let out = dir.join(name);
    let o = acfg(&[
        "construct",
        "--p",
        "2",
        "--n0",
        "2",
        "--g0",
        "zero",
        "--schedule",
        data("mult.json").to_str().unwrap(),
        "--rounds",
        rounds,
        "--seed",
        seed,
        "--out",
        out.to_str().unwrap(),
    ]);
    (o, out)
}

#[test]
fn golden_outputs() {
    let o = acfg(&["count-subspaces", "--p", "2", "--n", "4"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), golden("count_subspaces_2_4.json"));
    let o = acfg(&["flat", "--p", "5", "--poly", "x1^2+x2^2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), golden("flat_sum_of_squares_5.json"));
    let o = acfg(&["props", "--relation", "a", "--property", "BMON", "--structure", "affine:2:2", "--budget", "5000"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), golden("props_a_bmon_affine_plane.json"));
}

#[test]
fn construct_verify_mutate_ball() {
    let dir = tempfile::tempdir().unwrap();
    let (o, state) = construct(dir.path(), "s.json", "2", "3");
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["payload"]["direct_sums_verified"], true);
    assert_eq!(r["payload"]["stages"].as_array().unwrap().len(), 3);
    let st = state.to_str().unwrap();

    let o = acfg(&["verify", "--state", st]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["payload"]["failures"], 0);

    let o = acfg(&["verify", "--state", st, "--mutate", "stage=1,drop_row=0"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["status"], "fail");
    let first = &r["payload"]["failing_instances"][0];
    assert_eq!(first["formula_id"], "mult");
    assert!(r["diagnostics"][0].as_str().unwrap().contains("mult b=("));

    let o = acfg(&["ball", "--state", st, "--n", "2", "--h0", "zero"]);
    assert_eq!(o.status.code(), Some(0));
    let o = acfg(&["ball", "--state", st, "--n", "2", "--h0", "[[1,0]]"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn zero_rounds_give_one_stage() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = construct(dir.path(), "s0.json", "0", "0");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["payload"]["stages"].as_array().unwrap().len(), 1);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, sa) = construct(dir.path(), "s.json", "1", "9");
    let first = std::fs::read(&sa).unwrap();
    let (b, sb) = construct(dir.path(), "s.json", "1", "9");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(first, std::fs::read(sb).unwrap());
    let v1 = acfg(&["verify", "--state", sa.to_str().unwrap()]);
    let v2 = acfg(&["verify", "--state", sa.to_str().unwrap()]);
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"entries\": [{\"id\": 3}]}").unwrap();
    let o = acfg(&["construct", "--p", "2", "--n0", "2", "--schedule", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["status"], "error");
    assert_eq!(acfg(&["count-subspaces", "--p", "2"]).status.code(), Some(2));
    assert_eq!(acfg(&["verify", "--state", "/nonexistent/state.json"]).status.code(), Some(2));
    let o = acfg(&["flat", "--p", "5", "--poly", "x1^2 + q"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(json(&o)["diagnostics"][0].as_str().unwrap().contains("q"));
}

#[test]
fn theta_finds_products() {
    let o = acfg(&[
        "theta",
        "--p",
        "2",
        "--formula",
        "x1*x2 = y1 & x1 != 0 & x2 != 0",
        "--params",
        "w",
        "--base-degree",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["payload"]["outcome"], "found");
}

#[test]
fn independence_commands() {
    let plane = data("affine_plane.json");
    let plane = plane.to_str().unwrap();
    let eval =
        |rel: &str| acfg(&["indep", "--mode", "pregeo", "--config", plane, "--relation", rel, "--triple", "0,1;2,3;"]);
    assert_eq!(eval("a").status.code(), Some(0));
    assert_eq!(eval("pregeo").status.code(), Some(1));
    assert_eq!(eval("mon(a)").status.code(), Some(1));
    assert_eq!(eval("w").status.code(), Some(2));

    let sk = data("skeleton.json");
    let sk = sk.to_str().unwrap();
    let o = acfg(&["indep", "--mode", "quotient", "--config", sk, "--triple", "A;B;C"]);
    assert_eq!(o.status.code(), Some(0));
    let o = acfg(&["indep", "--mode", "skeleton", "--config", sk, "--relation", "st", "--triple", "A;B;C"]);
    assert_eq!(json(&o)["payload"]["holds"], false);
    let o = acfg(&["indep", "--mode", "skeleton", "--config", sk, "--relation", "mon(w)", "--triple", "A;B;C"]);
    assert_eq!(o.status.code(), Some(2));

    let o = acfg(&["props", "--relation", "star(pregeo)", "--property", "EXT2", "--structure", plane]);
    assert_eq!(o.status.code(), Some(0));
    let o = acfg(&["suite", "loc", "--r", "2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn density_over_a_small_ball() {
    let ax = data("axioms.json");
    let o = acfg(&["density", "--p", "2", "--n", "2", "--N", "4", "--axioms", ax.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["payload"]["exhaustive"], true);
    assert_eq!(r["payload"]["total"], 29);
}
