//! On-disk JSON formats consumed and produced by the CLI.
//!
//! Probabilities travel as strings ("0.32", "1/14") and are parsed as exact
//! rationals; no binary floating point touches the data path. A dataset
//! file is either instrumental-variables form (`"model": "iv-binary"` with
//! `p_z1` and the eight `p` entries) or general form (inline or built-in
//! model plus one conditional table per cluster), optionally with subjective
//! constraints in both cases.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datasets;
use crate::iv::{iv_model, observed_from_iv};
use crate::observed::{
    ConditionalTable, IvDistribution, ObservedConditionals, ObservedError, Relation,
    SubjectiveConstraint, SubjectiveTerm, IV_ENTRY_LABELS,
};
use crate::rational::{format_ratio, parse_rational, ParseRationalError, Rational};
use crate::rfm::{CausalModel, JointResponseDistribution, ModelError, Variable};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid number: {0}")]
    Number(#[from] ParseRationalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Observed(#[from] ObservedError),
    #[error("unknown built-in model `{0}`")]
    UnknownModel(String),
    #[error("instrumental-variables datasets need `p_z1` and all eight `p` entries")]
    IncompleteIv,
    #[error("unexpected `p` entry `{0}` (labels are 00.0 .. 11.1)")]
    BadIvLabel(String),
    #[error("iv-binary datasets take `p`/`p_z1`, general datasets take `tables`")]
    MixedForms,
    #[error("table for {variables:?}: {detail}")]
    BadTable { variables: Vec<String>, detail: String },
    #[error("unknown relation `{0}` (use =, <= or >=)")]
    BadRelation(String),
    #[error("prior for cluster {cluster:?}: {detail}")]
    BadPrior { cluster: Vec<String>, detail: String },
    #[error("q file must list exactly 16 values")]
    BadQFile,
    #[error("assignment `{0}` is not of the form var=value")]
    BadAssignment(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Builtin(String),
    Inline(ModelFile),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub variables: Vec<VariableSpec>,
    pub clusters: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub domain: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableSpec {
    pub variables: Vec<String>,
    #[serde(default)]
    pub given: Vec<String>,
    pub rows: Vec<RowSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowSpec {
    #[serde(default)]
    pub when: BTreeMap<String, String>,
    pub probs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermSpec {
    pub cell: BTreeMap<String, usize>,
    #[serde(default = "default_coef")]
    pub coef: String,
}

fn default_coef() -> String {
    "1".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub terms: Vec<TermSpec>,
    pub relation: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetFile {
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_z1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<TableSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<ConstraintSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriorSpec {
    pub cluster: Vec<String>,
    pub probs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriorFile {
    pub priors: Vec<PriorSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QFile {
    /// 16 values over the joint response cells, `r_d` major.
    pub q: Vec<String>,
}

/// A parsed, validated dataset. `iv` is present for iv-binary form files,
/// unlocking the closed-form bound evaluators.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub model: CausalModel,
    pub observed: ObservedConditionals,
    pub iv: Option<IvDistribution>,
}

fn parse_model(spec: &ModelSpec) -> Result<CausalModel, FormatError> {
    match spec {
        ModelSpec::Builtin(name) => {
            datasets::builtin_model(name).ok_or_else(|| FormatError::UnknownModel(name.clone()))
        }
        ModelSpec::Inline(file) => {
            let variables = file
                .variables
                .iter()
                .map(|v| Variable {
                    name: v.name.clone(),
                    domain: v.domain.clone(),
                    parents: v.parents.clone(),
                })
                .collect();
            Ok(CausalModel::new(variables, file.clusters.clone())?)
        }
    }
}

fn parse_constraints(specs: &[ConstraintSpec]) -> Result<Vec<SubjectiveConstraint>, FormatError> {
    specs
        .iter()
        .map(|spec| {
            let relation = match spec.relation.as_str() {
                "=" | "==" => Relation::Eq,
                "<=" => Relation::Le,
                ">=" => Relation::Ge,
                other => return Err(FormatError::BadRelation(other.to_string())),
            };
            Ok(SubjectiveConstraint {
                terms: spec
                    .terms
                    .iter()
                    .map(|t| {
                        Ok(SubjectiveTerm {
                            cell: t.cell.clone(),
                            coef: parse_rational(&t.coef)?,
                        })
                    })
                    .collect::<Result<_, FormatError>>()?,
                relation,
                rhs: parse_rational(&spec.rhs)?,
            })
        })
        .collect()
}

fn table_from_spec(model: &CausalModel, spec: &TableSpec) -> Result<ConditionalTable, FormatError> {
    let bad = |detail: String| FormatError::BadTable {
        variables: spec.variables.clone(),
        detail,
    };
    let mut row_count = 1usize;
    let mut given_sizes = Vec::new();
    for name in &spec.given {
        let size = model.variable(name)?.domain.len();
        given_sizes.push(size);
        row_count *= size;
    }
    let mut col_count = 1usize;
    let mut member_sizes = Vec::new();
    for name in &spec.variables {
        let size = model.variable(name)?.domain.len();
        member_sizes.push(size);
        col_count *= size;
    }
    let mut probs = vec![vec![Rational::from_integer(0.into()); col_count]; row_count];
    let mut seen = vec![false; row_count];
    for row in &spec.rows {
        if row.when.len() != spec.given.len() {
            return Err(bad(format!(
                "row condition {:?} must set exactly the conditioners {:?}",
                row.when, spec.given
            )));
        }
        let mut row_index = 0usize;
        for (name, size) in spec.given.iter().zip(&given_sizes) {
            let label = row
                .when
                .get(name)
                .ok_or_else(|| bad(format!("row condition missing `{name}`")))?;
            let value = model.value_index(name, label)?;
            row_index = row_index * size + value;
        }
        if seen[row_index] {
            return Err(bad(format!("duplicate row for condition {:?}", row.when)));
        }
        seen[row_index] = true;
        for (key, text) in &row.probs {
            let labels: Vec<&str> = key.split(',').collect();
            if labels.len() != spec.variables.len() {
                return Err(bad(format!(
                    "probability key `{key}` must join {} value labels with commas",
                    spec.variables.len()
                )));
            }
            let mut col = 0usize;
            for ((name, size), label) in
                spec.variables.iter().zip(&member_sizes).zip(&labels)
            {
                let value = model.value_index(name, label)?;
                col = col * size + value;
            }
            probs[row_index][col] = parse_rational(text)?;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(bad(format!("no row for parent configuration #{missing}")));
    }
    Ok(ConditionalTable {
        variables: spec.variables.clone(),
        given: spec.given.clone(),
        probs,
    })
}

/// Parses and validates a dataset file.
pub fn parse_dataset(json: &str) -> Result<Dataset, FormatError> {
    let file: DatasetFile = serde_json::from_str(json)?;
    let subjective = parse_constraints(&file.constraints)?;
    let is_iv_form = file.p.is_some() || file.p_z1.is_some();
    if is_iv_form {
        if !file.tables.is_empty() {
            return Err(FormatError::MixedForms);
        }
        match &file.model {
            ModelSpec::Builtin(name) if name == "iv-binary" => {}
            _ => return Err(FormatError::MixedForms),
        }
        let (Some(p_map), Some(p_z1)) = (&file.p, &file.p_z1) else {
            return Err(FormatError::IncompleteIv);
        };
        for key in p_map.keys() {
            if !IV_ENTRY_LABELS.contains(&key.as_str()) {
                return Err(FormatError::BadIvLabel(key.clone()));
            }
        }
        let mut entries: [Rational; 8] =
            core::array::from_fn(|_| Rational::from_integer(0.into()));
        for (i, label) in IV_ENTRY_LABELS.iter().enumerate() {
            let text = p_map.get(*label).ok_or(FormatError::IncompleteIv)?;
            entries[i] = parse_rational(text)?;
        }
        let iv = IvDistribution::new(entries, parse_rational(p_z1)?)?;
        let model = iv_model();
        let base = observed_from_iv(&iv)?;
        let observed = ObservedConditionals::with_subjective(
            &model,
            base.tables().to_vec(),
            subjective,
        )?;
        return Ok(Dataset {
            model,
            observed,
            iv: Some(iv),
        });
    }

    let model = parse_model(&file.model)?;
    let tables = file
        .tables
        .iter()
        .map(|spec| table_from_spec(&model, spec))
        .collect::<Result<Vec<_>, _>>()?;
    let observed = ObservedConditionals::with_subjective(&model, tables, subjective)?;
    Ok(Dataset {
        model,
        observed,
        iv: None,
    })
}

/// Parses a response-prior file against a model.
pub fn parse_priors(
    json: &str,
    model: &CausalModel,
) -> Result<Vec<JointResponseDistribution>, FormatError> {
    let file: PriorFile = serde_json::from_str(json)?;
    file.priors
        .iter()
        .map(|spec| {
            let bad = |detail: String| FormatError::BadPrior {
                cluster: spec.cluster.clone(),
                detail,
            };
            let counts: Vec<usize> = spec
                .cluster
                .iter()
                .map(|name| Ok(model.response_table(name)?.count()))
                .collect::<Result<_, ModelError>>()?;
            let total: usize = counts.iter().product();
            let mut probs = vec![Rational::from_integer(0.into()); total];
            for (key, text) in &spec.probs {
                let indices: Vec<&str> = key.split(',').collect();
                if indices.len() != spec.cluster.len() {
                    return Err(bad(format!(
                        "key `{key}` must join {} response indices with commas",
                        spec.cluster.len()
                    )));
                }
                let mut cell = 0usize;
                for (text, &count) in indices.iter().zip(&counts) {
                    let r: usize = text
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("bad response index `{text}`")))?;
                    if r >= count {
                        return Err(bad(format!("response index {r} out of range")));
                    }
                    cell = cell * count + r;
                }
                probs[cell] = parse_rational(text)?;
            }
            Ok(JointResponseDistribution::new(spec.cluster.clone(), probs))
        })
        .collect()
}

/// Parses a ground-truth response distribution file.
pub fn parse_q_file(json: &str) -> Result<[Rational; 16], FormatError> {
    let file: QFile = serde_json::from_str(json)?;
    if file.q.len() != 16 {
        return Err(FormatError::BadQFile);
    }
    let mut q: [Rational; 16] = core::array::from_fn(|_| Rational::from_integer(0.into()));
    for (slot, text) in q.iter_mut().zip(&file.q) {
        *slot = parse_rational(text)?;
    }
    Ok(q)
}

/// Renders a rational for a dataset file: a short exact decimal when one
/// exists, the `n/d` form otherwise.
pub fn rational_to_file_string(x: &Rational) -> String {
    let denom = x.denom();
    let mut reduced = denom.clone();
    let ten = BigInt::from(10);
    let mut digits = 0u32;
    while (&reduced % &ten) == BigInt::from(0) {
        reduced /= &ten;
        digits += 1;
    }
    for prime in [BigInt::from(2), BigInt::from(5)] {
        while (&reduced % &prime) == BigInt::from(0) {
            reduced /= &prime;
            digits += 1;
        }
    }
    if reduced == BigInt::from(1) && digits <= 12 {
        crate::rational::format_decimal(x, digits)
    } else {
        format_ratio(x)
    }
}

/// Builds the dataset file for an instrumental-variables distribution.
pub fn iv_dataset_file(p: &IvDistribution) -> DatasetFile {
    let mut map = BTreeMap::new();
    for (label, value) in IV_ENTRY_LABELS.iter().zip(p.entries()) {
        map.insert(label.to_string(), rational_to_file_string(value));
    }
    DatasetFile {
        model: ModelSpec::Builtin("iv-binary".into()),
        p_z1: Some(rational_to_file_string(p.p_z1())),
        p: Some(map),
        tables: Vec::new(),
        constraints: Vec::new(),
    }
}

/// Splits `var=value,var=value` into pairs.
pub fn parse_assignments(text: &str) -> Result<Vec<(String, String)>, FormatError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            pair.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| FormatError::BadAssignment(pair.to_string()))
        })
        .collect()
}
