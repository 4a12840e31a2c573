mod common;

use common::*;
use serde_json::Value;

const SECURITY: &str = "Q<=0.0[F fail] & Q>=0.5[F<=4 succ]";

fn names(v: &Value) -> Vec<String> {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn validate_shipped_models() {
    for model in [LOOP, BB84] {
        let run = qmc(&["validate", "--model", model]);
        assert_eq!(run.status, 0, "{}", run.stdout);
        assert!(run.stdout.contains("valid      true"));
    }
}

#[test]
fn validate_reports_the_leaking_state() {
    let run = qmc(&["validate", "--model", &fixture("substochastic.qmc.json"), "--output", "json"]);
    assert_eq!(run.status, 1);
    let report = run.json();
    assert_eq!(report["valid"], false);
    let violations = names(&report["violations"]);
    assert_eq!(violations.len(), 1);
    assert!(violations[0].contains("`leaky`"), "{violations:?}");
    let text = qmc(&["validate", "--model", &fixture("substochastic.qmc.json")]);
    assert!(text.stdout.contains("leaky"));
}

#[test]
fn validate_tolerance_is_configurable() {
    let loose = qmc(&["validate", "--model", &fixture("substochastic.qmc.json"), "--tol", "0.2"]);
    assert_eq!(loose.status, 0);
    let env = qmc_env(&["validate", "--model", &fixture("substochastic.qmc.json")], &[("QMC_TOL", "0.2")]);
    assert_eq!(env.status, 0);
    let flag_wins = qmc_env(
        &["validate", "--model", &fixture("substochastic.qmc.json"), "--tol", "1e-8"],
        &[("QMC_TOL", "0.2")],
    );
    assert_eq!(flag_wins.status, 1);
}

#[test]
fn unreadable_and_malformed_inputs_exit_2() {
    let missing = qmc(&["validate", "--model", "/nonexistent/model.json"]);
    assert_eq!(missing.status, 2);
    assert!(missing.stderr.contains("cannot read"));
    let broken = qmc(&["validate", "--model", &fixture("broken.qmc.json")]);
    assert_eq!(broken.status, 2);
    assert!(broken.stderr.contains("line 3"), "{}", broken.stderr);
    let invalid = qmc(&["check", "--model", &fixture("substochastic.qmc.json"), "--formula", "true"]);
    assert_eq!(invalid.status, 2);
    let bad_formula = qmc(&["check", "--model", LOOP, "--formula", "Q>=1.0[F l3"]);
    assert_eq!(bad_formula.status, 2);
    assert!(bad_formula.stderr.contains("column"));
    let unknown_atom = qmc(&["check", "--model", LOOP, "--formula", "nope"]);
    assert_eq!(unknown_atom.status, 2);
    let unknown_state = qmc(&["check", "--model", LOOP, "--formula", "l0", "--state", "zz"]);
    assert_eq!(unknown_state.status, 2);
    let unknown_bound = qmc(&["check", "--model", LOOP, "--formula", "Q>=Nope[F l3]"]);
    assert_eq!(unknown_bound.status, 2);
    let usage = qmc(&["check", "--model", LOOP]);
    assert_eq!(usage.status, 2);
}

#[test]
fn bb84_security_holds_at_s() {
    let run = qmc(&["check", "--model", BB84, "--formula", SECURITY, "--state", "s", "--output", "json"]);
    assert_eq!(run.status, 0, "{}", run.stderr);
    let report = run.json();
    assert_eq!(report["holds"], true);
    // ½I meets the bound 0.5·I exactly, so the verdict sits on the boundary.
    assert_eq!(report["marginal"], true);
    let evidence = report["evidence"].as_array().unwrap();
    assert_eq!(evidence.len(), 2);
    let succ = evidence.iter().find(|e| e["path"] == "F<=4 succ").unwrap();
    let at_s = succ["states"].as_array().unwrap().iter().find(|v| v["state"] == "s").unwrap();
    assert!(matrix_distance(&at_s["trace_operator"], &[&[0.5, 0.0], &[0.0, 0.5]]) < 1e-8);
    assert!(matrix_distance(&succ["bound"], &[&[0.5, 0.0], &[0.0, 0.5]]) < 1e-12);
}

#[test]
fn higher_success_bound_fails() {
    let run = qmc(&["check", "--model", BB84, "--formula", "Q>=0.6[F<=4 succ]", "--state", "s"]);
    assert_eq!(run.status, 1);
    assert!(run.stdout.contains("holds      s: false"));
}

#[test]
fn loop_terminates_everywhere() {
    let run = qmc(&["check", "--model", LOOP, "--formula", "Q>=1.0[F l3]", "--output", "json"]);
    assert_eq!(run.status, 0);
    let report = run.json();
    assert_eq!(names(&report["satisfying"]), ["l0", "l1", "l2", "l3"]);
    assert!(report["state"].is_null());
    let text = qmc(&["check", "--model", LOOP, "--formula", "Q>=1.0[F l3]"]);
    assert!(text.stdout.contains("sat        {l0, l1, l2, l3}"));
}

#[test]
fn kleene_and_closed_agree() {
    for method in ["closed", "kleene"] {
        let run = qmc(&["compute", "--model", LOOP, "--path-formula", "l0 | l1 | l2 U l3", "--state", "l0", "--method", method, "--output", "json"]);
        assert_eq!(run.status, 0, "{}", run.stderr);
        let report = run.json();
        assert_eq!(report["method"], method);
        assert!(matrix_distance(&report["trace_operator"], &[&[1.0, 0.0], &[0.0, 1.0]]) < 1e-8);
    }
}

#[test]
fn bounded_success_from_s0() {
    // Q(s0, F<=3 succ) = ¼(E⁰ + E¹∘X); both branches only succeed on |0⟩.
    let run = qmc(&["compute", "--model", BB84, "--path-formula", "F<=3 succ", "--state", "s0", "--output", "json"]);
    assert_eq!(run.status, 0);
    let report = run.json();
    assert!(matrix_distance(&report["trace_operator"], &[&[0.5, 0.0], &[0.0, 0.0]]) < 1e-8);
    assert!(report.get("matrix_rep").is_none());
}

#[test]
fn step_bound_flag_overrides_the_formula() {
    let run = qmc(&["compute", "--model", BB84, "--path-formula", "F succ", "--k", "3", "--state", "s0", "--output", "json"]);
    assert_eq!(run.json()["path_formula"], "F<=3 succ");
    assert!(matrix_distance(&run.json()["trace_operator"], &[&[0.5, 0.0], &[0.0, 0.0]]) < 1e-8);
    let next = qmc(&["compute", "--model", BB84, "--path-formula", "X s0", "--k", "3", "--state", "s"]);
    assert_eq!(next.status, 2);
}

#[test]
fn loop_matrix_representation() {
    let run = qmc(&["compute", "--model", LOOP, "--path-formula", "F l3", "--state", "l0", "--show", "matrix", "--output", "json"]);
    let rep = &run.json()["matrix_rep"];
    let expected: [&[f64]; 4] = [&[1.0, 0.0, 0.0, 1.0], &[0.0; 4], &[0.0; 4], &[0.0; 4]];
    assert!(matrix_distance(rep, &expected) < 1e-8);
    let text = qmc(&["compute", "--model", LOOP, "--path-formula", "F l3", "--state", "l0", "--show", "matrix"]);
    assert!(text.stdout.contains("matrix representation\n  [[1, 0, 0, 1],\n   [0, 0, 0, 0],"), "{}", text.stdout);
}

#[test]
fn next_true_is_identity() {
    for (model, state) in [(LOOP, "l2"), (BB84, "s101")] {
        let run = qmc(&["compute", "--model", model, "--path-formula", "X true", "--state", state, "--output", "json"]);
        let report = run.json();
        assert_eq!(report["equivalent_to_identity"], true);
        assert_eq!(report["equivalent_to_zero"], false);
    }
}

#[test]
fn json_reports_reproduce_their_verdicts() {
    let formulas = [SECURITY, "Q>=1.0[F l3]", "!abort & Q<=0.5[X s0 | s1]", "Q>=0.3[true U<=2 s00]"];
    for formula in formulas {
        let model = if formula.contains("l3") { LOOP } else { BB84 };
        let first = qmc(&["check", "--model", model, "--formula", formula, "--method", "kleene", "--tol", "1e-7", "--output", "json"]).json();
        let recorded_eps = first["tolerances"]["eps"].as_f64().unwrap().to_string();
        let again = qmc(&[
            "check",
            "--model",
            first["model"].as_str().unwrap(),
            "--formula",
            first["formula"].as_str().unwrap(),
            "--method",
            first["method"].as_str().unwrap(),
            "--tol",
            &recorded_eps,
            "--output",
            "json",
        ])
        .json();
        assert_eq!(first["verdicts"], again["verdicts"], "{formula}");
        assert_eq!(first["formula"], again["formula"]);
    }
}

#[test]
fn text_and_json_verdicts_agree() {
    for (model, formula) in [(BB84, SECURITY), (BB84, "Q>=0.25[F<=3 succ]"), (LOOP, "Q<=0.5[X l2]")] {
        let json = qmc(&["check", "--model", model, "--formula", formula, "--output", "json"]).json();
        let text = qmc(&["check", "--model", model, "--formula", formula]).stdout;
        let from_text: Vec<(String, bool, bool)> = text
            .lines()
            .filter_map(|l| l.strip_prefix("verdict "))
            .map(|l| {
                let parts: Vec<&str> = l.split_whitespace().collect();
                (parts[0].to_string(), parts[1] == "true", parts.get(2) == Some(&"marginal"))
            })
            .collect();
        let from_json: Vec<(String, bool, bool)> = json["verdicts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| (v["state"].as_str().unwrap().to_string(), v["verdict"] == true, v["marginal"] == true))
            .collect();
        assert_eq!(from_text, from_json, "{formula}");
    }
}

#[test]
fn tolerance_env_and_flag() {
    let args = ["check", "--model", BB84, "--formula", "Q>=0.6[F<=4 succ]", "--state", "s", "--output", "json"];
    let relaxed = qmc_env(&args, &[("QMC_TOL", "0.2")]);
    assert_eq!(relaxed.status, 0);
    let report = relaxed.json();
    assert_eq!(report["marginal"], true);
    assert_eq!(report["tolerances"]["eps"], 0.2);
    let mut strict: Vec<&str> = args.to_vec();
    strict.extend(["--tol", "1e-9"]);
    assert_eq!(qmc_env(&strict, &[("QMC_TOL", "0.2")]).status, 1);
    let negative = qmc(&["check", "--model", BB84, "--formula", "true", "--tol=-1"]);
    assert_eq!(negative.status, 2);
}

fn simulate(formula: &str, state: &str, extra: &[&str]) -> Value {
    let mut args = vec!["simulate", "--model", BB84, "--path-formula", formula, "--state", state, "--output", "json"];
    args.extend_from_slice(extra);
    let run = qmc(&args);
    assert_eq!(run.status, 0, "{}", run.stderr);
    run.json()
}

#[test]
fn simulated_bb84_success_and_failure() {
    let succ = simulate("F<=4 succ", "s", &["--samples", "100000", "--seed", "2024"]);
    let (p, se) = (succ["estimate"].as_f64().unwrap(), succ["stderr"].as_f64().unwrap());
    assert!((p - 0.5).abs() <= 3.0 * se, "{p} ± {se}");
    assert_eq!(succ["seed"], 2024);
    let fail = simulate("F<=4 fail", "s", &["--samples", "100000", "--seed", "2024"]);
    assert_eq!(fail["estimate"], 0.0);
}

#[test]
fn simulated_next_true_is_one() {
    for n in ["1", "17", "1000"] {
        let report = simulate("X true", "s0", &["--samples", n]);
        assert_eq!(report["estimate"], 1.0);
        assert!(report["seed"].is_u64());
    }
}

#[test]
fn simulation_with_an_initial_state_file() {
    // Q(s0, F<=3 succ) has trace operator ½|0⟩⟨0|.
    let zero = simulate("F<=3 succ", "s0", &["--samples", "20000", "--seed", "1", "--rho", &fixture("rho_zero.json")]);
    let (p, se) = (zero["estimate"].as_f64().unwrap(), zero["stderr"].as_f64().unwrap());
    assert!((p - 0.5).abs() <= 3.0 * se, "{p} ± {se}");
    let one = simulate("F<=3 succ", "s0", &["--samples", "5000", "--rho", &fixture("rho_one.json")]);
    assert_eq!(one["estimate"], 0.0);
    let plus_i = simulate("F<=3 succ", "s0", &["--samples", "20000", "--seed", "3", "--rho", &fixture("rho_plus_i.json")]);
    let (p, se) = (plus_i["estimate"].as_f64().unwrap(), plus_i["stderr"].as_f64().unwrap());
    assert!((p - 0.25).abs() <= 3.0 * se, "{p} ± {se}");
}

#[test]
fn same_seed_same_estimate() {
    let a = simulate("F<=4 succ", "s", &["--samples", "3000", "--seed", "5"]);
    let b = simulate("F<=4 succ", "s", &["--samples", "3000", "--seed", "5"]);
    assert_eq!(a["successes"], b["successes"]);
}

#[test]
fn simulation_rejects_unbounded_formulas() {
    let run = qmc(&["simulate", "--model", BB84, "--path-formula", "F succ", "--state", "s", "--samples", "10"]);
    assert_eq!(run.status, 2);
    assert!(run.stderr.contains("F<=k"), "{}", run.stderr);
    let bad_rho = qmc(&["simulate", "--model", BB84, "--path-formula", "X s0", "--state", "s", "--samples", "10", "--rho", &fixture("broken.qmc.json")]);
    assert_eq!(bad_rho.status, 2);
    let not_density = qmc(&["simulate", "--model", BB84, "--path-formula", "X s0", "--state", "s", "--samples", "10", "--rho", &fixture("substochastic.qmc.json")]);
    assert_eq!(not_density.status, 2);
}

#[test]
fn reports_match_the_schema_keys() {
    let schema: Value = serde_json::from_str(include_str!("../../../docs/report.schema.json")).unwrap();
    let reports = [
        ("validate", qmc(&["validate", "--model", LOOP, "--output", "json"]).json()),
        ("check", qmc(&["check", "--model", BB84, "--formula", SECURITY, "--output", "json"]).json()),
        ("compute", qmc(&["compute", "--model", LOOP, "--path-formula", "F l3", "--state", "l0", "--output", "json"]).json()),
        ("simulate", simulate("X s0", "s", &["--samples", "10"])),
    ];
    for (command, report) in reports {
        assert_eq!(report["command"], command);
        let def = &schema["$defs"][command];
        for key in def["required"].as_array().unwrap() {
            assert!(report.get(key.as_str().unwrap()).is_some(), "{command}: missing {key}");
        }
        let props = def["properties"].as_object().unwrap();
        for key in report.as_object().unwrap().keys() {
            assert!(props.contains_key(key), "{command}: {key} not in schema");
        }
    }
}
