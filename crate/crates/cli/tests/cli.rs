use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../instances")
        .join(name)
}

fn acp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acp"))
        .args(args)
        .output()
        .unwrap()
}

fn acp_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_acp"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn run(cmd: &str, file: &str) -> (i32, Value) {
    let out = acp(&[cmd, instance(file).to_str().unwrap()]);
    (
        out.status.code().unwrap(),
        serde_json::from_slice(&out.stdout).unwrap(),
    )
}

#[test]
fn verify_exit_codes() {
    let (code, r) = run("verify", "z4_two_dim.json");
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], "acp");
    assert_eq!(r["report"]["rank"], 4);

    let (code, r) = run("verify", "z2_not_psd.json");
    assert_eq!(code, 1);
    assert_eq!(r["report"]["conditions"]["2"], false);
}

#[test]
fn malformed_input_reports_position() {
    let out = acp_stdin(&["verify"], "{\n  \"group\": {\"cyclic\": 2,, }\n}");
    assert_eq!(out.status.code(), Some(2));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["error"]["line"], 2);
    assert!(r["error"]["column"].as_u64().unwrap() > 0);
}

#[test]
fn invalid_group_is_input_error() {
    let bad = r#"{"group": {"n": 2, "mul": [[0,1],[0,1]], "e": 0, "inv": [0,1], "alpha": "identity"},
                 "d": 1, "mats": {"0": [[[1,0]]], "1": [[[1,0]]]}}"#;
    let out = acp_stdin(&["verify", "-"], bad);
    assert_eq!(out.status.code(), Some(2));
    let missing =
        r#"{"group": {"cyclic": 2, "alpha": "identity"}, "d": 1, "mats": {"0": [[[1,0]]]}}"#;
    assert_eq!(acp_stdin(&["verify"], missing).status.code(), Some(2));
    let unknown =
        r#"{"group": {"cyclic": 2, "alpha": "identity"}, "d": 1, "mats": {}, "extra": 1}"#;
    assert_eq!(acp_stdin(&["verify"], unknown).status.code(), Some(2));
}

#[test]
fn dilate_reports_minimal_triple() {
    let out = acp(&[
        "dilate",
        "--emit-matrices",
        instance("z4_two_dim.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["triple"]["m"], 4);
    assert!(r["triple"]["J"].is_array());
    assert_eq!(run("dilate", "z2_not_psd.json").0, 1);
}

#[test]
fn rn_verdicts() {
    let (code, r) = run("rn", "z4_rn_scaled.json");
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], "dominated");
    assert!((r["lambda"].as_f64().unwrap() - 3.0).abs() < 1e-6);
    assert!(
        (r["certificate"]["residuals"]["lambda_min"]
            .as_f64()
            .unwrap()
            - 3.0)
            .abs()
            < 1e-8
    );

    let (code, r) = run("rn", "z2_rn_not_dominated.json");
    assert_eq!(code, 1);
    assert_eq!(r["verdict"], "not-dominated");

    assert_eq!(run("rn", "z2_ones.json").0, 2);
}

#[test]
fn equiv_modes() {
    let (code, r) = run("equiv", "z2_equiv_triples.json");
    assert_eq!(code, 0);
    assert_eq!(r["mode"], "triples");

    let (code, r) = run("equiv", "z4_rn_scaled.json");
    assert_eq!(code, 0);
    assert_eq!(r["mode"], "maps");
    assert_eq!(r["equivalence"]["v_identity_holds"], false);

    assert_eq!(run("equiv", "z2_rn_not_dominated.json").0, 1);
}

#[test]
fn counterexample_holds() {
    let out = acp(&["counterexample"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["checks"]["span_rank"], 2);
    assert_eq!(r["checks"]["hypotheses_hold"], true);
    assert!(r["values"]["1"]["gap"].as_f64().unwrap() > 1.0);
}

#[test]
fn reruns_are_byte_identical() {
    for (cmd, file) in [
        ("verify", "z4_two_dim.json"),
        ("dilate", "z3_explicit_tables.json"),
        ("rn", "z4_rn_scaled.json"),
        ("equiv", "z2_equiv_triples.json"),
    ] {
        let p = instance(file);
        let args = [cmd, p.to_str().unwrap(), "--emit-matrices"];
        assert_eq!(acp(&args).stdout, acp(&args).stdout, "{cmd} {file}");
    }
}

#[test]
fn output_flag_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = acp(&[
        "verify",
        instance("z2_ones.json").to_str().unwrap(),
        "-o",
        path.to_str().unwrap(),
        "--timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(r["wall_time_ms"].is_number());
    let plain = acp(&["verify", instance("z2_ones.json").to_str().unwrap()]);
    let r: Value = serde_json::from_slice(&plain.stdout).unwrap();
    assert!(r.get("wall_time_ms").is_none());
}

#[test]
fn tolerance_flags_override_file() {
    let p = instance("z3_explicit_tables.json");
    let out = acp(&[
        "verify",
        p.to_str().unwrap(),
        "--tol-psd",
        "1e-6",
        "--tol-rank",
        "1e-8",
    ]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["tolerances"]["eps_psd"], 1e-6);
    assert_eq!(r["tolerances"]["eps_rank"], 1e-8);
    let out = acp(&["verify", p.to_str().unwrap(), "--tol-psd", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}
