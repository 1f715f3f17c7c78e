//! Finite-domain functional causal models with canonical response-function
//! variables.
//!
//! Every variable is a deterministic function of its parents and a latent
//! response-function variable `r_x` whose value selects which of the
//! `|dom(X)|^(#parent configurations)` possible parent-to-value mappings is
//! active. A full assignment of response indices determines the factual
//! world and, holding the indices fixed while forcing antecedent variables,
//! every counterfactual world.
//!
//! Canonical numbering: a response index is the mixed-radix number whose
//! digits, over parent configurations in lexicographic parent-value order
//! (first configuration most significant), are the output value indices.
//! For a binary child of a binary parent this yields
//! 0 = constant-low, 1 = identity, 2 = inversion, 3 = constant-high.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use thiserror::Error;

use crate::rational::{renormalize_unit_sum, Rational, RenormalizeError};
use num_traits::{One, Zero};

/// Default cap on enumerated response states (and per-variable function counts).
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{variable}` has no value labelled `{value}`")]
    UnknownValue { variable: String, value: String },
    #[error("variable `{0}` needs a domain of at least two values")]
    DomainTooSmall(String),
    #[error("variable `{variable}` repeats domain label `{label}`")]
    DuplicateDomainLabel { variable: String, label: String },
    #[error("variable `{variable}` lists parent `{parent}` twice")]
    DuplicateParent { variable: String, parent: String },
    #[error("variable `{0}` cannot be its own parent")]
    SelfParent(String),
    #[error("parent relation is cyclic among {0:?}")]
    CyclicModel(Vec<String>),
    #[error("variable `{0}` appears in no cluster")]
    VariableInNoCluster(String),
    #[error("variable `{0}` appears in more than one cluster")]
    VariableInMultipleClusters(String),
    #[error("empty cluster")]
    EmptyCluster,
    #[error(
        "variable `{variable}` has {domain_size}^{parent_configs} canonical response \
         functions, which exceeds the cap of {cap}"
    )]
    ResponseCountExceedsCap {
        variable: String,
        domain_size: usize,
        parent_configs: usize,
        cap: usize,
    },
    #[error("model has {total} response states, which exceeds the cap of {cap}")]
    StateSpaceExceedsCap { total: String, cap: usize },
    #[error("missing response index for variable `{0}`")]
    MissingResponseIndex(String),
    #[error("response index {index} out of range for variable `{variable}` (count {count})")]
    ResponseIndexOutOfRange {
        variable: String,
        index: usize,
        count: usize,
    },
    #[error("parent values do not match variable `{variable}`'s parent list")]
    ParentValuesMismatch { variable: String },
    #[error("value index {index} out of range for variable `{variable}`")]
    ValueIndexOutOfRange { variable: String, index: usize },
    #[error("prior clusters do not match model clusters: {0}")]
    PriorClusterMismatch(String),
    #[error("prior for cluster {cluster:?} has {got} entries, expected {expected}")]
    PriorLengthMismatch {
        cluster: Vec<String>,
        got: usize,
        expected: usize,
    },
    #[error("prior for cluster {cluster:?} is not a probability distribution: {source}")]
    PriorNotDistribution {
        cluster: Vec<String>,
        source: RenormalizeError,
    },
    #[error("conditioning on an event of probability zero")]
    ConditioningOnNull,
    #[error("response index {0} out of range for a binary-response variable (0..=3)")]
    PotentialOutcomeIndexOutOfRange(usize),
}

/// A finite-domain variable: name, ordered value labels, ordered parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub domain: Vec<String>,
    pub parents: Vec<String>,
}

impl Variable {
    pub fn new(name: &str, domain: &[&str], parents: &[&str]) -> Self {
        Variable {
            name: name.to_string(),
            domain: domain.iter().map(|s| s.to_string()).collect(),
            parents: parents.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// The canonical family of deterministic parent-to-value mappings for one
/// variable, addressed by response index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseFunctionTable {
    pub variable: String,
    domain_size: usize,
    parent_domain_sizes: Vec<usize>,
    /// `powers[cfg] = domain_size^(configs - 1 - cfg)`: the place value of
    /// parent configuration `cfg` inside a response index.
    powers: Vec<usize>,
    count: usize,
}

impl ResponseFunctionTable {
    /// Number of canonical response functions, `|dom|^(#parent configs)`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// Number of parent configurations.
    pub fn config_count(&self) -> usize {
        self.powers.len()
    }

    fn config_index(&self, parent_values: &[usize]) -> Result<usize, ModelError> {
        if parent_values.len() != self.parent_domain_sizes.len() {
            return Err(ModelError::ParentValuesMismatch {
                variable: self.variable.clone(),
            });
        }
        let mut cfg = 0usize;
        for (&v, &size) in parent_values.iter().zip(&self.parent_domain_sizes) {
            if v >= size {
                return Err(ModelError::ParentValuesMismatch {
                    variable: self.variable.clone(),
                });
            }
            cfg = cfg * size + v;
        }
        Ok(cfg)
    }

    /// Value index produced by response `r` on the given parent values.
    pub fn mapping(&self, r: usize, parent_values: &[usize]) -> Result<usize, ModelError> {
        if r >= self.count {
            return Err(ModelError::ResponseIndexOutOfRange {
                variable: self.variable.clone(),
                index: r,
                count: self.count,
            });
        }
        let cfg = self.config_index(parent_values)?;
        Ok(self.value_at(r, cfg))
    }

    #[inline]
    fn value_at(&self, r: usize, cfg: usize) -> usize {
        (r / self.powers[cfg]) % self.domain_size
    }

    /// Re-encodes a full output table (one value index per parent
    /// configuration, in configuration order) into its canonical index.
    pub fn encode(&self, outputs: &[usize]) -> Result<usize, ModelError> {
        if outputs.len() != self.powers.len() {
            return Err(ModelError::ParentValuesMismatch {
                variable: self.variable.clone(),
            });
        }
        let mut r = 0usize;
        for &out in outputs {
            if out >= self.domain_size {
                return Err(ModelError::ValueIndexOutOfRange {
                    variable: self.variable.clone(),
                    index: out,
                });
            }
            r = r * self.domain_size + out;
        }
        Ok(r)
    }
}

/// Builds the canonical response-function table for `variable` given its
/// parents' domains (in parent order). Refuses if the function count would
/// exceed `cap`.
pub fn enumerate_response_functions(
    variable: &Variable,
    parent_domains: &[Vec<String>],
    cap: usize,
) -> Result<ResponseFunctionTable, ModelError> {
    if variable.domain.len() < 2 {
        return Err(ModelError::DomainTooSmall(variable.name.clone()));
    }
    let domain_size = variable.domain.len();
    let parent_domain_sizes: Vec<usize> = parent_domains.iter().map(|d| d.len()).collect();
    if parent_domain_sizes.iter().any(|&s| s == 0) {
        return Err(ModelError::DomainTooSmall(variable.name.clone()));
    }
    let mut configs = 1usize;
    for &s in &parent_domain_sizes {
        configs = configs.saturating_mul(s);
    }
    // count = domain_size^configs, refused as soon as it passes the cap
    let mut count = 1usize;
    for _ in 0..configs {
        match count.checked_mul(domain_size) {
            Some(c) if c <= cap => count = c,
            _ => {
                return Err(ModelError::ResponseCountExceedsCap {
                    variable: variable.name.clone(),
                    domain_size,
                    parent_configs: configs,
                    cap,
                })
            }
        }
    }
    let mut powers = vec![1usize; configs];
    for cfg in (0..configs.saturating_sub(1)).rev() {
        powers[cfg] = powers[cfg + 1] * domain_size;
    }
    Ok(ResponseFunctionTable {
        variable: variable.name.clone(),
        domain_size,
        parent_domain_sizes,
        powers,
        count,
    })
}

/// A causal model over finite variables, with a partition of the variables
/// into latent-coupling clusters (variables sharing an exogenous common
/// cause live in one cluster and carry a joint response distribution).
#[derive(Debug, Clone)]
pub struct CausalModel {
    variables: Vec<Variable>,
    clusters: Vec<Vec<String>>,
    tables: Vec<ResponseFunctionTable>,
    topo: Vec<usize>,
    parent_indices: Vec<Vec<usize>>,
    index: BTreeMap<String, usize>,
    state_cap: usize,
}

impl CausalModel {
    pub fn new(variables: Vec<Variable>, clusters: Vec<Vec<String>>) -> Result<Self, ModelError> {
        Self::with_state_cap(variables, clusters, DEFAULT_STATE_CAP)
    }

    pub fn with_state_cap(
        variables: Vec<Variable>,
        clusters: Vec<Vec<String>>,
        state_cap: usize,
    ) -> Result<Self, ModelError> {
        let mut index = BTreeMap::new();
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateVariable(v.name.clone()));
            }
        }
        for v in &variables {
            if v.domain.len() < 2 {
                return Err(ModelError::DomainTooSmall(v.name.clone()));
            }
            let mut labels = BTreeSet::new();
            for label in &v.domain {
                if !labels.insert(label) {
                    return Err(ModelError::DuplicateDomainLabel {
                        variable: v.name.clone(),
                        label: label.clone(),
                    });
                }
            }
            let mut seen = BTreeSet::new();
            for p in &v.parents {
                if p == &v.name {
                    return Err(ModelError::SelfParent(v.name.clone()));
                }
                if !index.contains_key(p) {
                    return Err(ModelError::UnknownVariable(p.clone()));
                }
                if !seen.insert(p) {
                    return Err(ModelError::DuplicateParent {
                        variable: v.name.clone(),
                        parent: p.clone(),
                    });
                }
            }
        }

        let parent_indices: Vec<Vec<usize>> = variables
            .iter()
            .map(|v| v.parents.iter().map(|p| index[p]).collect())
            .collect();

        // Kahn topological order; leftover nodes witness a cycle.
        let n = variables.len();
        let mut indegree = vec![0usize; n];
        for (child, ps) in parent_indices.iter().enumerate() {
            indegree[child] = ps.len();
        }
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (child, ps) in parent_indices.iter().enumerate() {
            for &p in ps {
                children[p].push(child);
            }
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            topo.push(v);
            for &c in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(c);
                }
            }
        }
        if topo.len() != n {
            let remaining = (0..n)
                .filter(|&i| indegree[i] > 0)
                .map(|i| variables[i].name.clone())
                .collect();
            return Err(ModelError::CyclicModel(remaining));
        }

        // Clusters must partition the variable set; member order and cluster
        // order are normalized to declaration order so that parameter
        // enumeration downstream is canonical.
        let mut seen = BTreeMap::new();
        let mut normalized: Vec<Vec<usize>> = Vec::new();
        for cluster in &clusters {
            if cluster.is_empty() {
                return Err(ModelError::EmptyCluster);
            }
            let mut members = Vec::new();
            for name in cluster {
                let &vi = index
                    .get(name)
                    .ok_or_else(|| ModelError::UnknownVariable(name.clone()))?;
                if seen.insert(vi, ()).is_some() {
                    return Err(ModelError::VariableInMultipleClusters(name.clone()));
                }
                members.push(vi);
            }
            members.sort_unstable();
            normalized.push(members);
        }
        for (i, v) in variables.iter().enumerate() {
            if !seen.contains_key(&i) {
                return Err(ModelError::VariableInNoCluster(v.name.clone()));
            }
        }
        normalized.sort_by_key(|m| m[0]);
        let clusters: Vec<Vec<String>> = normalized
            .iter()
            .map(|m| m.iter().map(|&i| variables[i].name.clone()).collect())
            .collect();

        let mut tables = Vec::with_capacity(n);
        for v in &variables {
            let parent_domains: Vec<Vec<String>> = v
                .parents
                .iter()
                .map(|p| variables[index[p]].domain.clone())
                .collect();
            tables.push(enumerate_response_functions(v, &parent_domains, state_cap)?);
        }

        Ok(CausalModel {
            variables,
            clusters,
            tables,
            topo,
            parent_indices,
            index,
            state_cap,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn clusters(&self) -> &[Vec<String>] {
        &self.clusters
    }

    pub fn state_cap(&self) -> usize {
        self.state_cap
    }

    pub fn variable_index(&self, name: &str) -> Result<usize, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
    }

    pub fn variable(&self, name: &str) -> Result<&Variable, ModelError> {
        Ok(&self.variables[self.variable_index(name)?])
    }

    pub fn response_table(&self, name: &str) -> Result<&ResponseFunctionTable, ModelError> {
        Ok(&self.tables[self.variable_index(name)?])
    }

    pub fn value_index(&self, variable: &str, label: &str) -> Result<usize, ModelError> {
        let v = self.variable(variable)?;
        v.domain.iter().position(|l| l == label).ok_or_else(|| {
            ModelError::UnknownValue {
                variable: variable.to_string(),
                value: label.to_string(),
            }
        })
    }

    /// All strict descendants of `name` in the parent DAG.
    pub fn descendants(&self, name: &str) -> Result<BTreeSet<String>, ModelError> {
        let start = self.variable_index(name)?;
        let mut out = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for (child, ps) in self.parent_indices.iter().enumerate() {
                if ps.contains(&v) && out.insert(self.variables[child].name.clone()) {
                    stack.push(child);
                }
            }
        }
        Ok(out)
    }

    /// Total number of joint response states, exactly.
    pub fn total_response_states(&self) -> BigUint {
        let mut total = BigUint::one();
        for t in &self.tables {
            total *= BigUint::from(t.count());
        }
        total
    }

    fn ensure_state_cap(&self) -> Result<(), ModelError> {
        let total = self.total_response_states();
        if total > BigUint::from(self.state_cap) {
            return Err(ModelError::StateSpaceExceedsCap {
                total: total.to_string(),
                cap: self.state_cap,
            });
        }
        Ok(())
    }

    /// Resolves a label map to per-variable value indices (None = unset).
    fn resolve_values(&self, values: &ValueMap) -> Result<Vec<Option<usize>>, ModelError> {
        let mut out = vec![None; self.variables.len()];
        for (name, label) in values {
            let vi = self.variable_index(name)?;
            out[vi] = Some(self.value_index(name, label)?);
        }
        Ok(out)
    }

    fn resolve_state(&self, state: &ResponseState) -> Result<Vec<usize>, ModelError> {
        let mut out = vec![usize::MAX; self.variables.len()];
        for (name, &r) in &state.0 {
            let vi = self.variable_index(name)?;
            let count = self.tables[vi].count();
            if r >= count {
                return Err(ModelError::ResponseIndexOutOfRange {
                    variable: name.clone(),
                    index: r,
                    count,
                });
            }
            out[vi] = r;
        }
        for (vi, &r) in out.iter().enumerate() {
            if r == usize::MAX {
                return Err(ModelError::MissingResponseIndex(
                    self.variables[vi].name.clone(),
                ));
            }
        }
        Ok(out)
    }

    /// Evaluates every variable in topological order, honoring forced values.
    pub(crate) fn evaluate_indices(
        &self,
        state: &[usize],
        forced: &[Option<usize>],
        out: &mut [usize],
    ) {
        for &vi in &self.topo {
            out[vi] = match forced[vi] {
                Some(v) => v,
                None => {
                    let mut cfg = 0usize;
                    for &pi in &self.parent_indices[vi] {
                        cfg = cfg * self.variables[pi].domain.len() + out[pi];
                    }
                    self.tables[vi].value_at(state[vi], cfg)
                }
            };
        }
    }

    fn labels(&self, indices: &[usize]) -> ValueMap {
        self.variables
            .iter()
            .zip(indices)
            .map(|(v, &i)| (v.name.clone(), v.domain[i].clone()))
            .collect()
    }

    /// Runs `f` on every joint response state, in lexicographic order over
    /// response indices (variables in declaration order, first variable most
    /// significant).
    pub(crate) fn for_each_state<F: FnMut(&[usize])>(&self, mut f: F) -> Result<(), ModelError> {
        self.ensure_state_cap()?;
        let counts: Vec<usize> = self.tables.iter().map(|t| t.count()).collect();
        let mut state = vec![0usize; counts.len()];
        loop {
            f(&state);
            let mut pos = counts.len();
            loop {
                if pos == 0 {
                    return Ok(());
                }
                pos -= 1;
                state[pos] += 1;
                if state[pos] < counts[pos] {
                    break;
                }
                state[pos] = 0;
            }
        }
    }

    /// Lexicographic cell index of `state` restricted to a cluster
    /// (cluster members in declaration order, first member most significant).
    pub(crate) fn cluster_cell(&self, cluster: &[String], state: &[usize]) -> usize {
        let mut cell = 0usize;
        for name in cluster {
            let vi = self.index[name];
            cell = cell * self.tables[vi].count() + state[vi];
        }
        cell
    }

    /// Number of joint response cells for a cluster.
    pub fn cluster_cell_count(&self, cluster: &[String]) -> Result<usize, ModelError> {
        let mut total = 1usize;
        for name in cluster {
            total = total
                .checked_mul(self.response_table(name)?.count())
                .ok_or_else(|| ModelError::StateSpaceExceedsCap {
                    total: "overflow".to_string(),
                    cap: self.state_cap,
                })?;
        }
        Ok(total)
    }
}

/// Assignment of value labels to (a subset of) variables.
pub type ValueMap = BTreeMap<String, String>;

/// Builds a `ValueMap` from `(variable, label)` pairs.
pub fn values(pairs: &[(&str, &str)]) -> ValueMap {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// A full assignment of response indices, one per model variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ResponseState(pub BTreeMap<String, usize>);

impl ResponseState {
    pub fn new(pairs: &[(&str, usize)]) -> Self {
        ResponseState(
            pairs
                .iter()
                .map(|(k, r)| (k.to_string(), *r))
                .collect(),
        )
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.0.get(name).copied()
    }
}

/// External forcing of variables to fixed values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Intervention(pub ValueMap);

impl Intervention {
    pub fn none() -> Self {
        Intervention(ValueMap::new())
    }

    pub fn new(pairs: &[(&str, &str)]) -> Self {
        Intervention(values(pairs))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Joint probability table over one cluster's response indices, in
/// lexicographic cell order (first cluster member most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct JointResponseDistribution {
    pub cluster: Vec<String>,
    pub probs: Vec<Rational>,
}

impl JointResponseDistribution {
    pub fn new(cluster: Vec<String>, probs: Vec<Rational>) -> Self {
        JointResponseDistribution { cluster, probs }
    }
}

fn extends(assignment: &[usize], partial: &[Option<usize>]) -> bool {
    partial
        .iter()
        .zip(assignment)
        .all(|(p, &a)| p.map_or(true, |v| v == a))
}

/// The unique factual world determined by a response state.
pub fn evaluate_factual(
    model: &CausalModel,
    state: &ResponseState,
) -> Result<ValueMap, ModelError> {
    evaluate_counterfactual(model, state, &Intervention::none())
}

/// The counterfactual world: intervened variables take their forced values,
/// everything else is computed recursively from (possibly intervened)
/// parents with the same response indices.
pub fn evaluate_counterfactual(
    model: &CausalModel,
    state: &ResponseState,
    intervention: &Intervention,
) -> Result<ValueMap, ModelError> {
    let indices = model.resolve_state(state)?;
    let forced = model.resolve_values(&intervention.0)?;
    let mut out = vec![0usize; model.variables().len()];
    model.evaluate_indices(&indices, &forced, &mut out);
    Ok(model.labels(&out))
}

/// All response states whose factual world extends `observations` and whose
/// counterfactual world under `intervention` extends `consequent`, in
/// lexicographic order over response indices.
pub fn consistent_region(
    model: &CausalModel,
    observations: &ValueMap,
    intervention: &Intervention,
    consequent: &ValueMap,
) -> Result<Vec<ResponseState>, ModelError> {
    let obs = model.resolve_values(observations)?;
    let cons = model.resolve_values(consequent)?;
    let forced = model.resolve_values(&intervention.0)?;
    let none = vec![None; model.variables().len()];
    let n = model.variables().len();
    let mut factual = vec![0usize; n];
    let mut twin = vec![0usize; n];
    let mut region = Vec::new();
    model.for_each_state(|state| {
        model.evaluate_indices(state, &none, &mut factual);
        if !extends(&factual, &obs) {
            return;
        }
        model.evaluate_indices(state, &forced, &mut twin);
        if !extends(&twin, &cons) {
            return;
        }
        region.push(ResponseState(
            model
                .variables()
                .iter()
                .zip(state)
                .map(|(v, &r)| (v.name.clone(), r))
                .collect(),
        ));
    })?;
    Ok(region)
}

fn validated_priors(
    model: &CausalModel,
    priors: &[JointResponseDistribution],
) -> Result<Vec<Vec<Rational>>, ModelError> {
    let mut by_cluster: Vec<Option<Vec<Rational>>> = vec![None; model.clusters().len()];
    for prior in priors {
        let mut sorted = prior.cluster.clone();
        sorted.sort_by_key(|name| model.variable_index(name).unwrap_or(usize::MAX));
        let pos = model
            .clusters()
            .iter()
            .position(|c| *c == sorted)
            .ok_or_else(|| {
                ModelError::PriorClusterMismatch(format!(
                    "{:?} is not a model cluster",
                    prior.cluster
                ))
            })?;
        if sorted != prior.cluster {
            return Err(ModelError::PriorClusterMismatch(format!(
                "cluster {:?} must list variables in declaration order {:?}",
                prior.cluster, sorted
            )));
        }
        if by_cluster[pos].is_some() {
            return Err(ModelError::PriorClusterMismatch(format!(
                "cluster {:?} given twice",
                prior.cluster
            )));
        }
        let expected = model.cluster_cell_count(&sorted)?;
        if prior.probs.len() != expected {
            return Err(ModelError::PriorLengthMismatch {
                cluster: prior.cluster.clone(),
                got: prior.probs.len(),
                expected,
            });
        }
        let mut probs = prior.probs.clone();
        renormalize_unit_sum(&mut probs).map_err(|source| ModelError::PriorNotDistribution {
            cluster: prior.cluster.clone(),
            source,
        })?;
        by_cluster[pos] = Some(probs);
    }
    by_cluster
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            p.ok_or_else(|| {
                ModelError::PriorClusterMismatch(format!(
                    "no prior for cluster {:?}",
                    model.clusters()[i]
                ))
            })
        })
        .collect()
}

/// Exact counterfactual probability `P(consequent | intervention, observations)`
/// for a fully specified model: clusters carry joint priors and are mutually
/// independent, so `P(r)` is the product of cluster probabilities.
pub fn query_exact(
    model: &CausalModel,
    priors: &[JointResponseDistribution],
    observations: &ValueMap,
    intervention: &Intervention,
    consequent: &ValueMap,
) -> Result<Rational, ModelError> {
    let cluster_probs = validated_priors(model, priors)?;
    let obs = model.resolve_values(observations)?;
    let cons = model.resolve_values(consequent)?;
    let forced = model.resolve_values(&intervention.0)?;
    let none = vec![None; model.variables().len()];
    let n = model.variables().len();
    let mut factual = vec![0usize; n];
    let mut twin = vec![0usize; n];
    let mut numerator = Rational::zero();
    let mut observed_mass = Rational::zero();
    model.for_each_state(|state| {
        model.evaluate_indices(state, &none, &mut factual);
        if !extends(&factual, &obs) {
            return;
        }
        let mut prob = Rational::one();
        for (cluster, probs) in model.clusters().iter().zip(&cluster_probs) {
            prob *= &probs[model.cluster_cell(cluster, state)];
        }
        observed_mass += &prob;
        model.evaluate_indices(state, &forced, &mut twin);
        if extends(&twin, &cons) {
            numerator += prob;
        }
    })?;
    if observed_mass.is_zero() {
        return Err(ModelError::ConditioningOnNull);
    }
    Ok(numerator / observed_mass)
}

/// Maps a binary-response index to the potential-outcome pair `(Y0, Y1)`:
/// the value the variable takes when its parent is held low resp. high.
pub fn response_to_potential_outcomes(r_y: usize) -> Result<(usize, usize), ModelError> {
    if r_y > 3 {
        return Err(ModelError::PotentialOutcomeIndexOutOfRange(r_y));
    }
    let y0 = usize::from(r_y == 2 || r_y == 3);
    let y1 = usize::from(r_y == 1 || r_y == 3);
    Ok((y0, y1))
}
