//! End-to-end tests driving the `cfbounds` binary.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfbounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf8")
}

fn write_temp(content: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(content.as_bytes()).expect("write");
    file
}

#[test]
fn ace_prints_the_trial_bounds() {
    let output = run(&["ace", "--dataset", "peptaid"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("-0.23 <= ACE(d -> y) <= -0.15"), "{text}");
    assert!(text.contains("[-23/100, -3/20]"), "{text}");
    assert!(text.contains("lp and symbolic bounds agree exactly"), "{text}");
}

#[test]
fn ace_output_is_byte_deterministic() {
    let first = run(&["ace", "--dataset", "peptaid", "--method", "both"]);
    let second = run(&["ace", "--dataset", "peptaid", "--method", "both"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn liability_queries_print_their_bounds() {
    for action in ["z=0", "d=0"] {
        let output = run(&[
            "counterfactual",
            "--dataset",
            "peptaid",
            "--do",
            action,
            "--given",
            "z=1,d=1,y=1",
            "--query",
            "y=1",
            "--method",
            "both",
        ]);
        assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
        let text = stdout(&output);
        assert!(text.contains("0.00 <= "), "{text}");
        assert!(text.contains(" <= 0.07"), "{text}");
        assert!(text.contains("[0, 1/14]"), "{text}");
    }
}

#[test]
fn consistency_pins_agreeing_interventions() {
    let output = run(&[
        "counterfactual",
        "--dataset",
        "peptaid",
        "--do",
        "z=1",
        "--given",
        "z=1,d=1,y=1",
        "--query",
        "y=1",
    ]);
    let text = stdout(&output);
    assert!(text.contains("1.00 <= "), "{text}");
    assert!(text.contains(" <= 1.00"), "{text}");
    assert!(text.contains("pinned by consistency"), "{text}");
}

#[test]
fn subpopulation_effects_print_both_targets() {
    let output = run(&[
        "ace",
        "--dataset",
        "peptaid",
        "--given",
        "z=1,d=1,y=1",
        "--stats",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("0.93 <= ACE(d -> y | z=1,d=1,y=1) <= 1.00"), "{text}");
    assert!(text.contains("0.93 <= ACE(z -> y | z=1,d=1,y=1) <= 1.00"), "{text}");
    assert!(text.contains("P(y=1|d=1) = 0.50"), "{text}");
    assert!(text.contains("P(y=1|d=0) = 0.26"), "{text}");
    assert!(text.contains("P(y=1|z=1) = 0.81"), "{text}");
    assert!(text.contains("P(y=1|z=0) = 0.36"), "{text}");
}

#[test]
fn party_bounds_and_exact_stories() {
    let output = run(&[
        "counterfactual",
        "--dataset",
        "party",
        "--do",
        "a=1",
        "--given",
        "a=0,b=0",
        "--query",
        "b=1",
    ]);
    let text = stdout(&output);
    assert!(text.contains("[8/9, 1]"), "{text}");

    // independent mishaps: product prior over the two response digits
    let unable = write_temp(
        r#"{ "priors": [
            { "cluster": ["a"], "probs": { "0": "0.5", "1": "0.5" } },
            { "cluster": ["b"], "probs": { "0": "0.09", "1": "0.81", "2": "0.01", "3": "0.09" } }
        ] }"#,
    );
    let output = run(&[
        "exact",
        "--model",
        "party",
        "--prior",
        unable.path().to_str().unwrap(),
        "--do",
        "a=1",
        "--given",
        "a=0,b=0",
        "--query",
        "b=1",
    ]);
    let text = stdout(&output);
    assert!(text.contains("= 0.90"), "{text}");
    assert!(text.contains("exact: 9/10"), "{text}");

    // contrarian-only exceptions: observing absence proves compliance
    let angry = write_temp(
        r#"{ "priors": [
            { "cluster": ["a"], "probs": { "0": "0.5", "1": "0.5" } },
            { "cluster": ["b"], "probs": { "1": "0.9", "2": "0.1" } }
        ] }"#,
    );
    let output = run(&[
        "exact",
        "--model",
        "party",
        "--prior",
        angry.path().to_str().unwrap(),
        "--do",
        "a=1",
        "--given",
        "a=0,b=0",
        "--query",
        "b=1",
    ]);
    let text = stdout(&output);
    assert!(text.contains("= 1.00"), "{text}");
    assert!(text.contains("exact: 1"), "{text}");
}

const PARTY_GENERAL: &str = r#"{
  "model": {
    "variables": [
      { "name": "a", "domain": ["0","1"], "parents": [] },
      { "name": "b", "domain": ["0","1"], "parents": ["a"] }
    ],
    "clusters": [["a"],["b"]]
  },
  "tables": [
    { "variables": ["a"], "given": [], "rows": [ { "when": {}, "probs": { "0": "0.5", "1": "0.5" } } ] },
    { "variables": ["b"], "given": ["a"], "rows": [
      { "when": { "a": "0" }, "probs": { "0": "0.9", "1": "0.1" } },
      { "when": { "a": "1" }, "probs": { "0": "0.1", "1": "0.9" } } ] }
  ]CONSTRAINTS
}"#;

fn party_with_constraint(constraint: &str) -> String {
    PARTY_GENERAL.replace(
        "CONSTRAINTS",
        &format!(
            r#",
  "constraints": [ {{ "terms": [ {{ "cell": {{ "b": {constraint} }} }} ], "relation": "=", "rhs": "0" }} ]"#
        ),
    )
}

#[test]
fn subjective_constraints_narrow_party_bounds() {
    // excluding the contrarian response narrows to the point 8/9
    let file = write_temp(&party_with_constraint("2"));
    let output = run(&[
        "counterfactual",
        "--file",
        file.path().to_str().unwrap(),
        "--do",
        "a=1",
        "--given",
        "a=0,b=0",
        "--query",
        "b=1",
    ]);
    let text = stdout(&output);
    assert!(text.contains("[8/9, 8/9]"), "{text}");

    // excluding the never-attends response pins the answer to one
    let file = write_temp(&party_with_constraint("0"));
    let output = run(&[
        "counterfactual",
        "--file",
        file.path().to_str().unwrap(),
        "--do",
        "a=1",
        "--given",
        "a=0,b=0",
        "--query",
        "b=1",
    ]);
    let text = stdout(&output);
    assert!(text.contains("[1, 1]"), "{text}");
}

#[test]
fn simulate_reports_containment() {
    let output = run(&["simulate", "--seed", "11", "-n", "2000"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("true ACE inside bounds: yes"), "{text}");
    assert!(text.contains("\"model\": \"iv-binary\""), "{text}");
}

#[test]
fn simulate_pushforward_of_a_witness_reproduces_the_dataset() {
    // the lower ACE witness of the built-in trial pushes forward to the
    // trial's own conditionals
    let bounds =
        cfbounds::bounds::ace_bounds_lp(&cfbounds::iv::peptaid_distribution()).unwrap();
    let witness = bounds.lower_witness.unwrap();
    let q_values: Vec<String> = witness
        .iter()
        .map(cfbounds::rational::format_ratio)
        .collect();
    let q_json = format!(
        r#"{{ "q": [{}] }}"#,
        q_values
            .iter()
            .map(|v| format!("\"{v}\""))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let file = write_temp(&q_json);
    let output = run(&[
        "simulate",
        "--q",
        file.path().to_str().unwrap(),
        "--pushforward",
        "--p-z1",
        "0.1",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    for entry in ["\"00.0\": \"0.32\"", "\"10.1\": \"0.67\"", "\"11.1\": \"0.14\""] {
        assert!(text.contains(entry), "{text}");
    }
    assert!(text.contains("true ACE: -0.23"), "{text}");
}

#[test]
fn datasets_list_and_show_round_trip() {
    let output = run(&["datasets", "list"]);
    assert_eq!(stdout(&output), "party\npeptaid\n");

    let output = run(&["datasets", "show", "peptaid"]);
    let text = stdout(&output);
    for value in ["0.32", "0.04", "0.02", "0.17", "0.67", "0.14", "0.1"] {
        assert!(text.contains(value), "{text}");
    }
    // shown JSON is directly consumable
    let file = write_temp(&text);
    let output = run(&["ace", "--file", file.path().to_str().unwrap()]);
    assert!(stdout(&output).contains("-0.23 <= ACE(d -> y) <= -0.15"));

    let output = run(&["datasets", "show", "party"]);
    let text = stdout(&output);
    assert!(text.contains("\"0\": \"0.9\""), "{text}");
    let output = run(&["datasets", "show", "nope"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn feasibility_exit_codes() {
    let output = run(&["feasible", "--dataset", "peptaid"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("feasible: yes"));

    let infeasible = write_temp(
        r#"{ "model": "iv-binary", "p_z1": "0.5",
             "p": { "00.0": "1", "01.0": "0", "10.0": "0", "11.0": "0",
                    "00.1": "0", "01.1": "0", "10.1": "1", "11.1": "0" } }"#,
    );
    let output = run(&["feasible", "--file", infeasible.path().to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let text = stdout(&output);
    assert!(text.contains("feasible: no"), "{text}");
    assert!(text.contains("certificate"), "{text}");

    let output = run(&["ace", "--file", infeasible.path().to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("infeasibility certificate"));
}

#[test]
fn nonlinear_queries_exit_3() {
    let file = write_temp(
        r#"{ "model": {
            "variables": [
              { "name": "a", "domain": ["0","1"], "parents": [] },
              { "name": "b", "domain": ["0","1"], "parents": ["a"] },
              { "name": "c", "domain": ["0","1"], "parents": [] },
              { "name": "e", "domain": ["0","1"], "parents": ["c"] }
            ],
            "clusters": [["a"],["b"],["c"],["e"]]
          },
          "tables": [
            { "variables": ["a"], "given": [], "rows": [ { "when": {}, "probs": { "0": "0.5", "1": "0.5" } } ] },
            { "variables": ["b"], "given": ["a"], "rows": [
              { "when": { "a": "0" }, "probs": { "0": "0.9", "1": "0.1" } },
              { "when": { "a": "1" }, "probs": { "0": "0.1", "1": "0.9" } } ] },
            { "variables": ["c"], "given": [], "rows": [ { "when": {}, "probs": { "0": "0.5", "1": "0.5" } } ] },
            { "variables": ["e"], "given": ["c"], "rows": [
              { "when": { "c": "0" }, "probs": { "0": "0.8", "1": "0.2" } },
              { "when": { "c": "1" }, "probs": { "0": "0.2", "1": "0.8" } } ] }
          ] }"#,
    );
    let output = run(&[
        "counterfactual",
        "--file",
        file.path().to_str().unwrap(),
        "--do",
        "a=1,c=1",
        "--query",
        "b=1,e=1",
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("nonlinear"));
}

#[test]
fn usage_errors_exit_1() {
    let output = run(&["ace", "--dataset", "nope"]);
    assert_eq!(output.status.code(), Some(1));
    let output = run(&["counterfactual", "--dataset", "peptaid", "--do", "zz", "--query", "y=1"]);
    assert_eq!(output.status.code(), Some(1));
    let output = run(&["no-such-command"]);
    assert_eq!(output.status.code(), Some(1));
    let output = run(&["--help"]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn json_reports_carry_exact_rationals() {
    let output = run(&["ace", "--dataset", "peptaid", "--method", "lp", "--json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&output)).expect("valid json");
    let report = &value["reports"][0];
    assert_eq!(report["lower"]["decimal"], "-0.23");
    assert_eq!(report["lower"]["exact"], "-23/100");
    assert_eq!(report["upper"]["exact"], "-3/20");
    assert!(report["lower_witness"].is_object());
}

#[test]
fn precision_flag_controls_rendering() {
    let output = run(&["ace", "--dataset", "peptaid", "--method", "lp", "--precision", "4"]);
    let text = stdout(&output);
    assert!(text.contains("-0.2300 <= ACE(d -> y) <= -0.1500"), "{text}");

    let output = run(&[
        "counterfactual",
        "--dataset",
        "peptaid",
        "--do",
        "z=0",
        "--given",
        "z=1,d=1,y=1",
        "--query",
        "y=1",
        "--precision",
        "4",
    ]);
    let text = stdout(&output);
    assert!(text.contains("0.0714"), "{text}");
}
