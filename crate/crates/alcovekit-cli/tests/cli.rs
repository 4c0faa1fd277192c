use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alcovekit"))
        .args(args)
        .env_remove("ALCOVEKIT_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v: Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    assert_eq!(v["schema"], 1);
    (out.status.code().unwrap(), v)
}

#[test]
fn census_sl2() {
    let (code, v) = json(&["census", "--group", "SL2", "--p", "7", "--e", "24", "--r", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["command"], "census");
    assert_eq!(v["payload"]["total"], 13);
    assert_eq!(v["payload"]["invariant"], 7);
}

#[test]
fn frobinv_witness() {
    let (code, v) = json(&["frobinv", "--group", "SL2", "--p", "7", "--e", "24", "--r", "2", "--lambda", "-3"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["invariant"], true);
    let (_, v) = json(&["frobinv", "--group", "SL2", "--p", "7", "--e", "24", "--r", "2", "--lambda", "-1"]);
    assert_eq!(v["payload"]["invariant"], false);
}

#[test]
fn adm_and_hmu() {
    let (code, v) = json(&["adm", "--group", "GL3", "--mu", "1,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["size"], 7);
    assert_eq!(v["payload"]["elements"].as_array().unwrap().len(), 7);
    let (_, v) = json(&["hmu", "--group", "GL3xGL3", "--mu", "1,0,0,1,0,0"]);
    assert_eq!(v["payload"]["h_mu"], 1);
}

#[test]
fn generic_weil_restriction() {
    let (code, v) = json(&[
        "generic", "--group", "GL3xGL3", "--p", "19", "--r", "4", "--s", "((123),(12))", "--mu", "16,11,7,4,2,1", "--d", "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["d_generic"], true);
    assert_eq!(v["payload"]["c_phi_x_equals_x"], true);
    assert_eq!(v["payload"]["lambda"][0], serde_json::json!([9461, 45612, 27101, 84708, 123959, 49439]));
}

#[test]
fn straighten_ok_and_refused() {
    let (code, v) = json(&["straighten", "--p", "7", "--a", "1", "--f", "1", "--instances", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["runs"].as_array().unwrap().len(), 2);
    let (code, v) = json(&["straighten", "--p", "2", "--a", "3", "--f", "1"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "refused");
}

#[test]
fn precision_env_sets_window() {
    let out = Command::new(env!("CARGO_BIN_EXE_alcovekit"))
        .args(["straighten", "--p", "7", "--a", "1", "--f", "1"])
        .env("ALCOVEKIT_PRECISION", "40")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["payload"]["window"], 40);
}

#[test]
fn compare_holds() {
    let (code, v) = json(&["compare", "--p", "3", "--a", "2", "--n", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
}

#[test]
fn figure_matches_golden() {
    let dir = std::env::temp_dir().join(format!("alcovekit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig.svg");
    let (code, _) = json(&["figure", "--kind", "sl2", "--p", "7", "--e", "24", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert_eq!(svg, alcovekit::acceptance::GOLDEN_SL2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(run(&["census", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let (code, v) = json(&["census", "--group", "XX3", "--p", "7", "--e", "24"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "error");
}

#[test]
fn verify_is_idempotent() {
    let a = run(&["verify"]);
    let b = run(&["verify"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["payload"]["criteria"].as_array().unwrap().len(), 9);
    assert_eq!(v["payload"]["passed"], true);
}
