//! Probabilistic specifications: conditional probability tables on the
//! observables, one table per latent-coupling cluster, plus optional
//! subjective constraints on the response-function distributions.
//!
//! A table column that sums to within 1e-9 of one (decimal truncation in
//! published data) is renormalized exactly; larger deviations are rejected.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{
    format_ratio, renormalize_unit_sum, Rational, RenormalizeError,
};
use crate::rfm::{CausalModel, ModelError, ValueMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservedError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("table variables {0:?} are not a cluster of the model")]
    NotACluster(Vec<String>),
    #[error("cluster {0:?} has no table")]
    MissingTable(Vec<String>),
    #[error("cluster {0:?} has more than one table")]
    DuplicateTable(Vec<String>),
    #[error(
        "table for {variables:?} conditions on {got:?}, expected the reduced parents {expected:?}"
    )]
    WrongConditioners {
        variables: Vec<String>,
        got: Vec<String>,
        expected: Vec<String>,
    },
    #[error("table for {variables:?} has wrong shape: {detail}")]
    WrongShape { variables: Vec<String>, detail: String },
    #[error("table for {variables:?} is not a conditional distribution: {source}")]
    NotADistribution {
        variables: Vec<String>,
        source: RenormalizeError,
    },
    #[error("probability {0} is outside [0, 1]")]
    OutOfRange(String),
    #[error("value-space enumeration exceeds the model cap")]
    ValueSpaceExceedsCap,
    #[error("subjective constraint is malformed: {0}")]
    BadSubjective(String),
}

/// `P(variables | given)` with rational entries.
///
/// `probs[g][c]`: `g` indexes configurations of `given` (lexicographic,
/// first conditioner most significant), `c` indexes joint values of
/// `variables` (lexicographic, first member most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    pub variables: Vec<String>,
    pub given: Vec<String>,
    pub probs: Vec<Vec<Rational>>,
}

impl ConditionalTable {
    pub fn new(
        variables: &[&str],
        given: &[&str],
        probs: Vec<Vec<Rational>>,
    ) -> Self {
        ConditionalTable {
            variables: variables.iter().map(|s| s.to_string()).collect(),
            given: given.iter().map(|s| s.to_string()).collect(),
            probs,
        }
    }
}

/// Relation of a subjective constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

/// One term of a subjective constraint: a coefficient on a single joint
/// response cell of one cluster, addressed by per-variable response indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectiveTerm {
    pub cell: BTreeMap<String, usize>,
    pub coef: Rational,
}

/// An extra linear row imposed on one cluster's response distribution,
/// e.g. "P(r_b = 2) = 0".
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectiveConstraint {
    pub terms: Vec<SubjectiveTerm>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl SubjectiveConstraint {
    /// `coef * P(r_cell) relation rhs` with a single term.
    pub fn single(cell: &[(&str, usize)], relation: Relation, rhs: Rational) -> Self {
        SubjectiveConstraint {
            terms: vec![SubjectiveTerm {
                cell: cell.iter().map(|(v, r)| (v.to_string(), *r)).collect(),
                coef: Rational::one(),
            }],
            relation,
            rhs,
        }
    }
}

/// The probabilistic specification: one validated conditional table per
/// cluster (in model cluster order) plus subjective constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedConditionals {
    tables: Vec<ConditionalTable>,
    subjective: Vec<SubjectiveConstraint>,
}

/// Reduced parents of a cluster: the union of members' parents, minus the
/// members themselves, in model declaration order.
pub fn reduced_parents(model: &CausalModel, cluster: &[String]) -> Result<Vec<String>, ModelError> {
    let mut indices = Vec::new();
    for name in cluster {
        for parent in &model.variable(name)?.parents {
            let pi = model.variable_index(parent)?;
            if !cluster.contains(parent) && !indices.contains(&pi) {
                indices.push(pi);
            }
        }
    }
    indices.sort_unstable();
    Ok(indices
        .into_iter()
        .map(|i| model.variables()[i].name.clone())
        .collect())
}

fn domain_product(model: &CausalModel, names: &[String]) -> Result<usize, ObservedError> {
    let mut total = 1usize;
    for name in names {
        total = total
            .checked_mul(model.variable(name)?.domain.len())
            .ok_or(ObservedError::ValueSpaceExceedsCap)?;
    }
    Ok(total)
}

impl ObservedConditionals {
    pub fn new(
        model: &CausalModel,
        tables: Vec<ConditionalTable>,
    ) -> Result<Self, ObservedError> {
        Self::with_subjective(model, tables, Vec::new())
    }

    pub fn with_subjective(
        model: &CausalModel,
        tables: Vec<ConditionalTable>,
        subjective: Vec<SubjectiveConstraint>,
    ) -> Result<Self, ObservedError> {
        let mut slots: Vec<Option<ConditionalTable>> = vec![None; model.clusters().len()];
        for table in tables {
            let mut sorted = table.variables.clone();
            sorted.sort_by_key(|n| model.variable_index(n).unwrap_or(usize::MAX));
            let pos = model
                .clusters()
                .iter()
                .position(|c| *c == sorted)
                .ok_or_else(|| ObservedError::NotACluster(table.variables.clone()))?;
            if table.variables != sorted {
                return Err(ObservedError::WrongShape {
                    variables: table.variables.clone(),
                    detail: format!("members must be listed in declaration order {sorted:?}"),
                });
            }
            if slots[pos].is_some() {
                return Err(ObservedError::DuplicateTable(sorted));
            }
            let expected_given = reduced_parents(model, &sorted)?;
            if table.given != expected_given {
                return Err(ObservedError::WrongConditioners {
                    variables: table.variables.clone(),
                    got: table.given.clone(),
                    expected: expected_given,
                });
            }
            let rows = domain_product(model, &table.given)?;
            let cols = domain_product(model, &table.variables)?;
            if table.probs.len() != rows {
                return Err(ObservedError::WrongShape {
                    variables: table.variables.clone(),
                    detail: format!("{} parent rows, expected {rows}", table.probs.len()),
                });
            }
            let mut table = table;
            for column in table.probs.iter_mut() {
                if column.len() != cols {
                    return Err(ObservedError::WrongShape {
                        variables: table.variables.clone(),
                        detail: format!("{} entries in a row, expected {cols}", column.len()),
                    });
                }
                for v in column.iter() {
                    if v.is_negative() || *v > Rational::one() {
                        return Err(ObservedError::OutOfRange(format_ratio(v)));
                    }
                }
                renormalize_unit_sum(column).map_err(|source| {
                    ObservedError::NotADistribution {
                        variables: table.variables.clone(),
                        source,
                    }
                })?;
            }
            slots[pos] = Some(table);
        }
        let tables = slots
            .into_iter()
            .enumerate()
            .map(|(i, slot)| {
                slot.ok_or_else(|| ObservedError::MissingTable(model.clusters()[i].clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;

        // every subjective constraint must address full cells of exactly one
        // cluster; anything else would be silently unenforceable
        for constraint in &subjective {
            if constraint.terms.is_empty() {
                return Err(ObservedError::BadSubjective("no terms".into()));
            }
            let mut target: Option<Vec<String>> = None;
            for term in &constraint.terms {
                let mut names: Vec<String> = term.cell.keys().cloned().collect();
                names.sort_by_key(|n| model.variable_index(n).unwrap_or(usize::MAX));
                let cluster = model
                    .clusters()
                    .iter()
                    .find(|c| **c == names)
                    .ok_or_else(|| {
                        ObservedError::BadSubjective(format!(
                            "cell {names:?} is not a full cluster cell"
                        ))
                    })?;
                match &target {
                    None => target = Some(cluster.clone()),
                    Some(prev) if prev != cluster => {
                        return Err(ObservedError::BadSubjective(
                            "terms span different clusters".into(),
                        ))
                    }
                    _ => {}
                }
                for (name, &r) in &term.cell {
                    let count = model.response_table(name)?.count();
                    if r >= count {
                        return Err(ObservedError::BadSubjective(format!(
                            "response index {r} out of range for `{name}` (count {count})"
                        )));
                    }
                }
            }
        }
        Ok(ObservedConditionals { tables, subjective })
    }

    /// Tables in model cluster order.
    pub fn tables(&self) -> &[ConditionalTable] {
        &self.tables
    }

    pub fn table_for(&self, model: &CausalModel, cluster: &[String]) -> Option<&ConditionalTable> {
        model
            .clusters()
            .iter()
            .position(|c| c == cluster)
            .map(|i| &self.tables[i])
    }

    pub fn subjective(&self) -> &[SubjectiveConstraint] {
        &self.subjective
    }

    /// Joint probability of one full value assignment (indices per variable,
    /// in model order): the product of cluster conditionals.
    pub(crate) fn joint_probability(
        &self,
        model: &CausalModel,
        values: &[usize],
    ) -> Rational {
        let mut prob = Rational::one();
        for (cluster, table) in model.clusters().iter().zip(&self.tables) {
            let mut row = 0usize;
            for name in &table.given {
                let vi = model.variable_index(name).expect("validated");
                row = row * model.variables()[vi].domain.len() + values[vi];
            }
            let mut col = 0usize;
            for name in cluster {
                let vi = model.variable_index(name).expect("validated");
                col = col * model.variables()[vi].domain.len() + values[vi];
            }
            prob *= &table.probs[row][col];
        }
        prob
    }

    /// Probability of a partial observation, by exact enumeration of the
    /// value space. Empty observations have probability one.
    pub fn event_probability(
        &self,
        model: &CausalModel,
        event: &ValueMap,
    ) -> Result<Rational, ObservedError> {
        if event.is_empty() {
            return Ok(Rational::one());
        }
        let n = model.variables().len();
        let mut fixed = vec![None::<usize>; n];
        for (name, label) in event {
            let vi = model.variable_index(name)?;
            fixed[vi] = Some(model.value_index(name, label)?);
        }
        let sizes: Vec<usize> = model
            .variables()
            .iter()
            .map(|v| v.domain.len())
            .collect();
        let total = sizes.iter().try_fold(1usize, |acc, &s| {
            acc.checked_mul(s).filter(|&t| t <= model.state_cap())
        });
        if total.is_none() {
            return Err(ObservedError::ValueSpaceExceedsCap);
        }
        let mut values = vec![0usize; n];
        let mut mass = Rational::zero();
        loop {
            if fixed
                .iter()
                .zip(&values)
                .all(|(f, &v)| f.map_or(true, |fv| fv == v))
            {
                mass += self.joint_probability(model, &values);
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(mass);
                }
                pos -= 1;
                values[pos] += 1;
                if values[pos] < sizes[pos] {
                    break;
                }
                values[pos] = 0;
            }
        }
    }
}

/// Observable distribution of the binary instrumental-variables model: the
/// eight `P(y, d | z)` entries plus `P(z = 1)`.
///
/// Entry order is fixed as `00.0, 01.0, 10.0, 11.0, 00.1, 01.1, 10.1, 11.1`
/// where the label digits are the values of `y` and `d` and the suffix is
/// the arm `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct IvDistribution {
    p: [Rational; 8],
    p_z1: Rational,
}

/// Row labels matching the fixed entry order.
pub const IV_ENTRY_LABELS: [&str; 8] = [
    "00.0", "01.0", "10.0", "11.0", "00.1", "01.1", "10.1", "11.1",
];

impl IvDistribution {
    pub fn new(p: [Rational; 8], p_z1: Rational) -> Result<Self, ObservedError> {
        for v in p.iter().chain([&p_z1]) {
            if v.is_negative() || *v > Rational::one() {
                return Err(ObservedError::OutOfRange(format_ratio(v)));
            }
        }
        let mut p = p;
        let (z0, z1) = p.split_at_mut(4);
        renormalize_unit_sum(z0).map_err(|source| ObservedError::NotADistribution {
            variables: vec!["d".into(), "y".into()],
            source,
        })?;
        renormalize_unit_sum(z1).map_err(|source| ObservedError::NotADistribution {
            variables: vec!["d".into(), "y".into()],
            source,
        })?;
        Ok(IvDistribution { p, p_z1 })
    }

    /// `P(y, d | z)`.
    pub fn entry(&self, y: usize, d: usize, z: usize) -> &Rational {
        &self.p[z * 4 + y * 2 + d]
    }

    /// Entries in the fixed order.
    pub fn entries(&self) -> &[Rational; 8] {
        &self.p
    }

    pub fn p_z1(&self) -> &Rational {
        &self.p_z1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::rfm::Variable;

    fn party_model() -> CausalModel {
        CausalModel::new(
            vec![
                Variable::new("a", &["0", "1"], &[]),
                Variable::new("b", &["0", "1"], &["a"]),
            ],
            vec![vec!["a".into()], vec!["b".into()]],
        )
        .unwrap()
    }

    fn party_tables() -> Vec<ConditionalTable> {
        vec![
            ConditionalTable::new(&["a"], &[], vec![vec![rat(1, 2), rat(1, 2)]]),
            ConditionalTable::new(
                &["b"],
                &["a"],
                vec![
                    vec![rat(9, 10), rat(1, 10)],
                    vec![rat(1, 10), rat(9, 10)],
                ],
            ),
        ]
    }

    #[test]
    fn validates_and_orders_tables() {
        let model = party_model();
        let observed = ObservedConditionals::new(&model, party_tables()).unwrap();
        assert_eq!(observed.tables()[0].variables, vec!["a"]);
        assert_eq!(observed.tables()[1].variables, vec!["b"]);
    }

    #[test]
    fn event_probability_multiplies_cluster_tables() {
        let model = party_model();
        let observed = ObservedConditionals::new(&model, party_tables()).unwrap();
        let p = observed
            .event_probability(&model, &crate::rfm::values(&[("a", "0"), ("b", "0")]))
            .unwrap();
        assert_eq!(p, rat(9, 20)); // 1/2 * 9/10
        let p = observed
            .event_probability(&model, &crate::rfm::values(&[("b", "0")]))
            .unwrap();
        assert_eq!(p, rat(1, 2)); // 1/2*9/10 + 1/2*1/10
        assert!(observed
            .event_probability(&model, &ValueMap::new())
            .unwrap()
            .is_one());
    }

    #[test]
    fn near_one_columns_are_renormalized_exactly() {
        let model = party_model();
        let mut tables = party_tables();
        // 0.9 + 0.0999999999 is within 1e-9 of 1
        tables[1].probs[0] = vec![rat(9, 10), Rational::new(999_999_999.into(), 10_000_000_000u64.into())];
        let observed = ObservedConditionals::new(&model, tables).unwrap();
        let column = &observed.tables()[1].probs[0];
        let total: Rational = column.iter().sum();
        assert!(total.is_one());
    }

    #[test]
    fn bad_columns_are_rejected() {
        let model = party_model();
        let mut tables = party_tables();
        tables[1].probs[0] = vec![rat(9, 10), rat(2, 10)];
        assert!(matches!(
            ObservedConditionals::new(&model, tables),
            Err(ObservedError::NotADistribution { .. })
        ));
        let mut tables = party_tables();
        tables[1].probs[0] = vec![rat(11, 10), rat(-1, 10)];
        assert!(matches!(
            ObservedConditionals::new(&model, tables),
            Err(ObservedError::OutOfRange(_))
        ));
    }

    #[test]
    fn missing_and_misshaped_tables_are_rejected() {
        let model = party_model();
        let only_a = vec![party_tables().remove(0)];
        assert!(matches!(
            ObservedConditionals::new(&model, only_a),
            Err(ObservedError::MissingTable(_))
        ));
        let mut tables = party_tables();
        tables[1].given = vec![];
        assert!(matches!(
            ObservedConditionals::new(&model, tables),
            Err(ObservedError::WrongConditioners { .. })
        ));
    }

    #[test]
    fn iv_distribution_validates_and_indexes() {
        let p = [
            rat(32, 100),
            rat(32, 100),
            rat(4, 100),
            rat(32, 100),
            rat(2, 100),
            rat(17, 100),
            rat(67, 100),
            rat(14, 100),
        ];
        let iv = IvDistribution::new(p, rat(1, 10)).unwrap();
        assert_eq!(*iv.entry(0, 0, 0), rat(8, 25));
        assert_eq!(*iv.entry(1, 0, 1), rat(67, 100));
        assert_eq!(*iv.entry(1, 1, 1), rat(7, 50));
        assert!(IvDistribution::new(
            [
                rat(1, 1),
                rat(0, 1),
                rat(0, 1),
                rat(0, 1),
                rat(1, 2),
                rat(0, 1),
                rat(0, 1),
                rat(0, 1)
            ],
            rat(1, 10)
        )
        .is_err());
        let mut bad = [
            rat(1, 1),
            rat(0, 1),
            rat(0, 1),
            rat(0, 1),
            rat(1, 1),
            rat(0, 1),
            rat(0, 1),
            rat(0, 1),
        ];
        bad[1] = rat(-1, 10);
        assert!(matches!(
            IvDistribution::new(bad, rat(1, 10)),
            Err(ObservedError::OutOfRange(_))
        ));
    }

    #[test]
    fn reduced_parents_of_a_pair() {
        let model = CausalModel::new(
            vec![
                Variable::new("z", &["0", "1"], &[]),
                Variable::new("d", &["0", "1"], &["z"]),
                Variable::new("y", &["0", "1"], &["d"]),
            ],
            vec![vec!["z".into()], vec!["d".into(), "y".into()]],
        )
        .unwrap();
        assert_eq!(
            reduced_parents(&model, &["d".into(), "y".into()]).unwrap(),
            vec!["z".to_string()]
        );
    }
}
