//! Query reports: every number is carried both as a rounded decimal string
//! (round-half-even, caller-chosen precision) and as the exact rational.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bounds::{BoundMethod, BoundsResult, SymbolicBounds};
use crate::rational::{format_decimal, format_ratio, Rational};

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ExactValue {
    pub decimal: String,
    pub exact: String,
}

pub fn exact_value(x: &Rational, places: u32) -> ExactValue {
    ExactValue {
        decimal: format_decimal(x, places),
        exact: format_ratio(x),
    }
}

/// A rendered bounds answer for one quantity.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub quantity: String,
    pub method: String,
    pub lower: ExactValue,
    pub upper: ExactValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_witness: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_witness: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_term: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_term: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn witness_map(
    parameters: &[String],
    witness: &Option<Vec<Rational>>,
) -> Option<BTreeMap<String, String>> {
    witness.as_ref().map(|w| {
        parameters
            .iter()
            .zip(w)
            .filter(|(name, _)| !name.starts_with("_slack"))
            .map(|(name, value)| (name.clone(), format_ratio(value)))
            .collect()
    })
}

impl BoundsReport {
    pub fn from_bounds(quantity: &str, bounds: &BoundsResult, places: u32) -> Self {
        BoundsReport {
            quantity: quantity.to_string(),
            method: match bounds.method {
                BoundMethod::Lp => "lp",
                BoundMethod::Symbolic => "symbolic",
            }
            .to_string(),
            lower: exact_value(&bounds.lower, places),
            upper: exact_value(&bounds.upper, places),
            lower_witness: witness_map(&bounds.parameters, &bounds.lower_witness),
            upper_witness: witness_map(&bounds.parameters, &bounds.upper_witness),
            lower_term: None,
            upper_term: None,
            notes: Vec::new(),
        }
    }

    pub fn from_symbolic(quantity: &str, bounds: &SymbolicBounds, places: u32) -> Self {
        BoundsReport {
            quantity: quantity.to_string(),
            method: "symbolic".to_string(),
            lower: exact_value(&bounds.lower, places),
            upper: exact_value(&bounds.upper, places),
            lower_witness: None,
            upper_witness: None,
            lower_term: Some(bounds.lower_term_text.clone()),
            upper_term: Some(bounds.upper_term_text.clone()),
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: String) -> Self {
        self.notes.push(note);
        self
    }

    /// Deterministic plain-text rendering.
    pub fn human(&self) -> String {
        let mut lines = vec![
            format!(
                "{} <= {} <= {}",
                self.lower.decimal, self.quantity, self.upper.decimal
            ),
            format!("  exact: [{}, {}]", self.lower.exact, self.upper.exact),
            format!("  method: {}", self.method),
        ];
        if let Some(term) = &self.lower_term {
            lines.push(format!("  lower attained by: {term}"));
        }
        if let Some(term) = &self.upper_term {
            lines.push(format!("  upper attained by: {term}"));
        }
        for note in &self.notes {
            lines.push(format!("  note: {note}"));
        }
        lines.join("\n")
    }
}

/// A rendered point-value answer.
#[derive(Debug, Clone, Serialize)]
pub struct ValueReport {
    pub quantity: String,
    pub value: ExactValue,
}

impl ValueReport {
    pub fn new(quantity: &str, value: &Rational, places: u32) -> Self {
        ValueReport {
            quantity: quantity.to_string(),
            value: exact_value(value, places),
        }
    }

    pub fn human(&self) -> String {
        format!(
            "{} = {}\n  exact: {}",
            self.quantity, self.value.decimal, self.value.exact
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn decimal_and_exact_agree() {
        let v = exact_value(&rat(-23, 100), 2);
        assert_eq!(v.decimal, "-0.23");
        assert_eq!(v.exact, "-23/100");
        let v = exact_value(&rat(13, 14), 2);
        assert_eq!(v.decimal, "0.93");
        assert_eq!(v.exact, "13/14");
    }

    #[test]
    fn slack_parameters_stay_out_of_witnesses() {
        let bounds = BoundsResult {
            lower: rat(0, 1),
            upper: rat(1, 2),
            parameters: vec!["r_b=0".into(), "_slack0".into()],
            lower_witness: Some(vec![rat(1, 1), rat(0, 1)]),
            upper_witness: None,
            method: crate::bounds::BoundMethod::Lp,
        };
        let report = BoundsReport::from_bounds("P(x)", &bounds, 2);
        let witness = report.lower_witness.unwrap();
        assert!(witness.contains_key("r_b=0"));
        assert!(!witness.contains_key("_slack0"));
    }
}
