//! Built-in datasets, stored as the exact JSON the CLI consumes so that
//! `datasets show` round-trips byte-for-byte through `--file`.

use crate::rfm::{CausalModel, Variable};

/// The product-sample trial: assignment probability 0.1 with the eight
/// observed conditionals.
pub const PEPTAID_JSON: &str = r#"{
  "model": "iv-binary",
  "p_z1": "0.1",
  "p": {
    "00.0": "0.32",
    "01.0": "0.32",
    "10.0": "0.04",
    "11.0": "0.32",
    "00.1": "0.02",
    "01.1": "0.17",
    "10.1": "0.67",
    "11.1": "0.14"
  }
}"#;

/// The two-person attendance example: `a -> b`, ninety percent agreement in
/// both directions, an even prior on `a`.
pub const PARTY_JSON: &str = r#"{
  "model": {
    "variables": [
      { "name": "a", "domain": ["0", "1"], "parents": [] },
      { "name": "b", "domain": ["0", "1"], "parents": ["a"] }
    ],
    "clusters": [["a"], ["b"]]
  },
  "tables": [
    {
      "variables": ["a"],
      "given": [],
      "rows": [{ "when": {}, "probs": { "0": "0.5", "1": "0.5" } }]
    },
    {
      "variables": ["b"],
      "given": ["a"],
      "rows": [
        { "when": { "a": "0" }, "probs": { "0": "0.9", "1": "0.1" } },
        { "when": { "a": "1" }, "probs": { "0": "0.1", "1": "0.9" } }
      ]
    }
  ]
}"#;

/// Names of the built-in datasets, sorted.
pub fn list() -> Vec<&'static str> {
    vec!["party", "peptaid"]
}

pub fn builtin_json(name: &str) -> Option<&'static str> {
    match name {
        "peptaid" => Some(PEPTAID_JSON),
        "party" => Some(PARTY_JSON),
        _ => None,
    }
}

/// The attendance model on its own (also available as `--model party`).
pub fn party_model() -> CausalModel {
    CausalModel::new(
        vec![
            Variable::new("a", &["0", "1"], &[]),
            Variable::new("b", &["0", "1"], &["a"]),
        ],
        vec![vec!["a".into()], vec!["b".into()]],
    )
    .expect("fixed model is valid")
}

/// Built-in model by name.
pub fn builtin_model(name: &str) -> Option<CausalModel> {
    match name {
        "iv-binary" => Some(crate::iv::iv_model()),
        "party" => Some(party_model()),
        _ => None,
    }
}
