use std::process::Command;

use ccs_cli::{run, Outcome, CONFIG_ENV, EXIT_NO, EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE};
use serde_json::Value;

fn ccsw(args: &[&str]) -> Outcome {
    run(std::iter::once("ccsw").chain(args.iter().copied()))
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn parse_prints_the_term_and_rejects_garbage() {
    let out = ccsw(&["parse", "a.0 + b.0"]);
    assert_eq!((out.code, out.stdout.as_str()), (EXIT_OK, "a.0 + b.0\n"));
    let out = ccsw(&["--output", "json", "parse", "a.(X || 0)"]);
    assert_eq!(json(&out)["closed"], Value::Bool(false));
    assert_eq!(ccsw(&["parse", "a.(0"]).code, EXIT_USAGE);
    assert_eq!(ccsw(&["parse", "d.0"]).code, EXIT_USAGE);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(ccsw(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(ccsw(&["equiv", "--semantics", "nope", "0", "0"]).code, EXIT_USAGE);
    assert_eq!(ccsw(&["equiv", "--semantics", "b", "X", "0"]).code, EXIT_USAGE);
    assert_eq!(ccsw(&["check-axioms", "--file", "/no/such/file.ax"]).code, EXIT_USAGE);
}

#[test]
fn equiv_reports_verdicts_in_the_exit_code() {
    let out = ccsw(&["equiv", "--semantics", "b", "a.0 || b.0", "a.b.0 + b.a.0"]);
    assert_eq!(out.code, EXIT_OK, "{out:?}");
    let out = ccsw(&["--alphabet", "a,b,c", "--output", "json", "equiv", "--semantics", "f", "a.(b.0 + c.0)", "a.b.0 + a.c.0"]);
    assert_eq!(out.code, EXIT_NO);
    let v = json(&out);
    assert_eq!(v["equal"], Value::Bool(false));
    assert!(v["witness"].is_object());
    let out = ccsw(&["--alphabet", "a,b,c", "equiv", "--semantics", "t", "a.(b.0 + c.0)", "a.b.0 + a.c.0"]);
    assert_eq!(out.code, EXIT_OK);
}

#[test]
fn matrix_covers_the_spectrum() {
    let out = ccsw(&["--output", "json", "matrix", "a.0", "a.tau.0"]);
    let v = json(&out);
    let m = v.as_object().unwrap();
    assert_eq!(m.len(), 14);
    assert_eq!((&m["B"], &m["RWB"], &m["WB"]), (&Value::Bool(false), &Value::Bool(true), &Value::Bool(true)));
}

#[test]
fn lts_lists_states_and_transitions() {
    let out = ccsw(&["--output", "json", "lts", "a.0 || ~a.0"]);
    let v = json(&out);
    assert_eq!(v["transitions"].as_array().unwrap().len(), 5);
}

#[test]
fn prove_exit_codes() {
    assert_eq!(ccsw(&["prove", "--semantics", "b", "a.0 || b.0", "a.b.0 + b.a.0"]).code, EXIT_OK);
    assert_eq!(ccsw(&["prove", "--semantics", "b", "a.0", "b.0"]).code, EXIT_NO);
    let out = ccsw(&["prove", "--semantics", "pf", "a.0", "a.0 + a.0"]);
    assert_eq!(out.code, EXIT_UNKNOWN, "{out:?}");
}

#[test]
fn emitted_proofs_check_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let p = path.to_str().unwrap();
    let out = ccsw(&["eliminate", "--system", "ft", "a.0 || (b.0 + ~a.0)", "--emit-proof", p]);
    assert_eq!(out.code, EXIT_OK, "{out:?}");
    assert_eq!(ccsw(&["check-proof", p]).code, EXIT_OK);
    // pointing a step at a different axiom breaks it
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let step = v["steps"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|s| s["axiom"].is_string())
        .expect("an axiom step");
    step["axiom"] = Value::String("A4".into());
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let out = ccsw(&["--output", "json", "check-proof", p]);
    assert_eq!(out.code, EXIT_NO);
    assert_eq!(json(&out)["valid"], Value::Bool(false));
}

#[test]
fn check_axioms_passes_bundled_and_fails_bad_files() {
    let out = ccsw(&["--samples", "30", "check-axioms", "--file", "e_rs.ax"]);
    assert_eq!(out.code, EXIT_OK, "{out:?}");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ax");
    std::fs::write(&path, "T1 : a.X + a.Y = a.(X + Y)\n").unwrap();
    let out = ccsw(&["--samples", "30", "check-axioms", "--file", path.to_str().unwrap(), "--semantics", "f"]);
    assert_eq!(out.code, EXIT_NO, "{out:?}");
}

#[test]
fn witness_reports_are_json() {
    let out = ccsw(&["witness", "--family", "eN", "--n", "2"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout.trim(), r#"{"family":"eN","n":2,"sound":true,"lhs_summand":true,"rhs_summand":false}"#);
    let out = ccsw(&["--samples", "50", "witness", "--family", "eps", "--n", "2", "--rules", "interleave_sync"]);
    assert_eq!(out.code, EXIT_OK, "{out:?}");
    assert_eq!(ccsw(&["witness", "--family", "eps", "--n", "2"]).code, EXIT_USAGE);
}

#[test]
fn ops_checks_rule_sets() {
    let out = ccsw(&["--samples", "100", "ops", "--rules", "interleave_sync", "--check-pf"]);
    assert_eq!(out.code, EXIT_OK, "{out:?}");
    let out = ccsw(&["--samples", "100", "--output", "json", "ops", "--rules", "broken", "--check-pf"]);
    assert_eq!(out.code, EXIT_NO);
    assert_eq!(json(&out)["parallel_decomposition"]["verdict"], "fail");
}

#[test]
fn seeded_runs_repeat_exactly() {
    let args = ["--seed", "4", "--samples", "40", "check-axioms", "--file", "e_ct.ax"];
    assert_eq!(ccsw(&args), ccsw(&args));
}

#[test]
fn config_files_and_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ccsw.toml");
    std::fs::write(&path, "alphabet = [\"a\", \"b\", \"c\"]\noutput = \"json\"\n").unwrap();
    let out = ccsw(&["--config", path.to_str().unwrap(), "parse", "c.0"]);
    assert_eq!(out.code, EXIT_OK, "{out:?}");
    assert_eq!(json(&out)["size"], 1);
    // flags override the file
    let out = ccsw(&["--config", path.to_str().unwrap(), "--output", "text", "parse", "c.0"]);
    assert_eq!(out.stdout, "c.0\n");
    let out = Command::new(env!("CARGO_BIN_EXE_ccsw"))
        .env(CONFIG_ENV, &path)
        .args(["parse", "c.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"size\": 1"));
    std::fs::write(&path, "colour = \"red\"\n").unwrap();
    assert_eq!(ccsw(&["--config", path.to_str().unwrap(), "parse", "0"]).code, EXIT_USAGE);
}
