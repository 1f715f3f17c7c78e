//! Counterfactual bounds: assembles the linear objective of a query over the
//! one cluster the data leave free, optimizes it in both directions with the
//! exact simplex, and evaluates the published closed-form bound sets for the
//! binary instrumental-variables model as independent cross-checks.
//!
//! A query is linear exactly when at most one cluster's response distribution
//! is underdetermined by the constraints; with two or more free clusters the
//! objective has degree >= 2 and the query is refused (nonlinear optimization
//! is out of scope by design).

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::constraints::{self, ConstraintError, LinearConstraintSystem};
use crate::iv::{iv_model, observed_from_iv};
use crate::linalg;
use crate::lp::{self, LinearProgram, LpError, LpStatus, Sense};
use crate::observed::{IvDistribution, ObservedConditionals, ObservedError, IV_ENTRY_LABELS};
use crate::rational::Rational;
use crate::rfm::{
    self, CausalModel, Intervention, JointResponseDistribution, ModelError, ValueMap,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Observed(#[from] ObservedError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(
        "query objective is nonlinear: clusters {clusters:?} are all underdetermined \
         by the probabilistic specification (at most one may be)"
    )]
    NonlinearObjective { clusters: Vec<Vec<String>> },
    #[error("observed distribution is infeasible for cluster {cluster:?}")]
    InfeasibleObserved {
        cluster: Vec<String>,
        certificate: Vec<Rational>,
    },
    #[error("conditioning on an event of probability zero")]
    ConditioningOnNull,
    #[error("conditional undefined: {0} is zero")]
    UndefinedConditional(String),
}

/// What kind of question is being asked; `Ace`-family kinds carry the
/// treatment/response variable names they refer to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryKind {
    Exact,
    Bound,
    Ace { treatment: String, response: String },
    TreatmentResponse { treatment: String, response: String },
    SubpopAce { treatment: String, response: String },
}

/// A counterfactual question: given `observations`, if `intervention` had
/// been forced, what is the probability of `consequent`?
#[derive(Debug, Clone, PartialEq)]
pub struct CounterfactualQuery {
    pub kind: QueryKind,
    pub observations: ValueMap,
    pub intervention: Intervention,
    pub consequent: ValueMap,
}

impl CounterfactualQuery {
    pub fn bound(observations: ValueMap, intervention: Intervention, consequent: ValueMap) -> Self {
        CounterfactualQuery {
            kind: QueryKind::Bound,
            observations,
            intervention,
            consequent,
        }
    }

    /// True when every intervened variable is observed at the forced value,
    /// which pins the query to its ordinary conditional.
    pub fn intervention_agrees_with_observations(&self) -> bool {
        self.intervention
            .0
            .iter()
            .all(|(name, value)| self.observations.get(name) == Some(value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    Lp,
    Symbolic,
}

/// Exact bounds with witnesses attaining both endpoints (LP method).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsResult {
    pub lower: Rational,
    pub upper: Rational,
    /// Parameter names of the witness entries (LP method).
    pub parameters: Vec<String>,
    pub lower_witness: Option<Vec<Rational>>,
    pub upper_witness: Option<Vec<Rational>>,
    pub method: BoundMethod,
}

/// The objective of a linear counterfactual query over the free cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledObjective {
    pub free_cluster: Vec<String>,
    /// Coefficients over the free cluster's system parameters (already
    /// divided by the constant denominator `P(o)`).
    pub coefficients: Vec<Rational>,
    pub denominator: Rational,
    pub system: LinearConstraintSystem,
    /// Point-identified distributions of the remaining clusters.
    pub identified: Vec<(Vec<String>, Vec<Rational>)>,
}

/// Either a linear objective over one free cluster, or a fully determined
/// value when every cluster is point-identified.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveOutcome {
    Linear(AssembledObjective),
    Determined(Rational),
}

fn infeasible_from_system(
    cluster: &[String],
    system: &LinearConstraintSystem,
) -> BoundsError {
    let lp = LinearProgram::new(
        Sense::Min,
        vec![Rational::zero(); system.dimension()],
        system.equalities.clone(),
    )
    .expect("square by construction");
    let solution = lp::solve(&lp);
    let certificate = solution.certificate.unwrap_or_default();
    BoundsError::InfeasibleObserved {
        cluster: cluster.to_vec(),
        certificate,
    }
}

/// Splits the clusters into point-identified distributions and free systems
/// by solving each cluster's equality system.
fn classify_clusters(
    model: &CausalModel,
    observed: &ObservedConditionals,
) -> Result<
    (
        Vec<(Vec<String>, Vec<Rational>)>,
        Vec<(Vec<String>, LinearConstraintSystem)>,
    ),
    BoundsError,
> {
    let systems = constraints::cluster_systems(model, observed)?;
    let mut identified = Vec::new();
    let mut free = Vec::new();
    for (cluster, system) in model.clusters().iter().zip(systems) {
        match linalg::solve_equalities(&system.equalities, system.dimension()) {
            linalg::LinearSolve::Unique(solution) => {
                if solution.iter().any(|v| v.is_negative()) {
                    return Err(infeasible_from_system(cluster, &system));
                }
                let cells = model.cluster_cell_count(cluster)?;
                identified.push((cluster.clone(), solution[..cells].to_vec()));
            }
            linalg::LinearSolve::Underdetermined { .. } => {
                free.push((cluster.clone(), system));
            }
            linalg::LinearSolve::Inconsistent { .. } => {
                return Err(infeasible_from_system(cluster, &system));
            }
        }
    }
    Ok((identified, free))
}

/// Checks that the observed specification admits at least one response
/// distribution per cluster (equalities, nonnegativity and subjective rows
/// together).
pub fn verify_observed(
    model: &CausalModel,
    observed: &ObservedConditionals,
) -> Result<(), BoundsError> {
    let (_, free) = classify_clusters(model, observed)?;
    for (cluster, system) in free {
        let lp = LinearProgram::new(
            Sense::Min,
            vec![Rational::zero(); system.dimension()],
            system.equalities.clone(),
        )?;
        let solution = lp::solve(&lp);
        if solution.status == LpStatus::Infeasible {
            return Err(BoundsError::InfeasibleObserved {
                cluster,
                certificate: solution.certificate.unwrap_or_default(),
            });
        }
    }
    Ok(())
}

/// Builds the linear objective of Eq.-(2)-style queries: coefficient of each
/// free-cluster cell is the total identified-cluster probability of the
/// consistent response states hitting that cell, divided by `P(o)`.
pub fn assemble_objective(
    model: &CausalModel,
    observed: &ObservedConditionals,
    query: &CounterfactualQuery,
) -> Result<ObjectiveOutcome, BoundsError> {
    let (identified, mut free) = classify_clusters(model, observed)?;
    if free.len() > 1 {
        return Err(BoundsError::NonlinearObjective {
            clusters: free.into_iter().map(|(c, _)| c).collect(),
        });
    }

    if free.is_empty() {
        let priors: Vec<JointResponseDistribution> = identified
            .iter()
            .map(|(cluster, probs)| JointResponseDistribution::new(cluster.clone(), probs.clone()))
            .collect();
        let value = rfm::query_exact(
            model,
            &priors,
            &query.observations,
            &query.intervention,
            &query.consequent,
        )
        .map_err(|e| match e {
            ModelError::ConditioningOnNull => BoundsError::ConditioningOnNull,
            other => BoundsError::Model(other),
        })?;
        return Ok(ObjectiveOutcome::Determined(value));
    }

    let (free_cluster, system) = free.pop().expect("exactly one");
    let denominator = observed.event_probability(model, &query.observations)?;
    if denominator.is_zero() {
        return Err(BoundsError::ConditioningOnNull);
    }

    let region = rfm::consistent_region(
        model,
        &query.observations,
        &query.intervention,
        &query.consequent,
    )?;
    let cells = model.cluster_cell_count(&free_cluster)?;
    let mut coefficients = vec![Rational::zero(); system.dimension()];
    for state in &region {
        let mut weight = Rational::one();
        for (cluster, probs) in &identified {
            let mut cell = 0usize;
            for name in cluster {
                cell = cell * model.response_table(name)?.count()
                    + state.get(name).expect("full state");
            }
            weight *= &probs[cell];
        }
        let mut cell = 0usize;
        for name in &free_cluster {
            cell =
                cell * model.response_table(name)?.count() + state.get(name).expect("full state");
        }
        debug_assert!(cell < cells);
        coefficients[cell] += weight;
    }
    for c in coefficients.iter_mut() {
        *c /= &denominator;
    }

    Ok(ObjectiveOutcome::Linear(AssembledObjective {
        free_cluster,
        coefficients,
        denominator,
        system,
        identified,
    }))
}

/// Exact tight bounds on a counterfactual query, with attaining witnesses.
pub fn bound_query(
    model: &CausalModel,
    observed: &ObservedConditionals,
    query: &CounterfactualQuery,
) -> Result<BoundsResult, BoundsError> {
    match assemble_objective(model, observed, query)? {
        ObjectiveOutcome::Determined(value) => Ok(BoundsResult {
            lower: value.clone(),
            upper: value,
            parameters: Vec::new(),
            lower_witness: None,
            upper_witness: None,
            method: BoundMethod::Lp,
        }),
        ObjectiveOutcome::Linear(assembled) => {
            let lp = LinearProgram::new(
                Sense::Min,
                assembled.coefficients.clone(),
                assembled.system.equalities.clone(),
            )?;
            let (lower, upper) = lp::optimize_both(&lp);
            if lower.status == LpStatus::Infeasible {
                return Err(BoundsError::InfeasibleObserved {
                    cluster: assembled.free_cluster.clone(),
                    certificate: lower.certificate.unwrap_or_default(),
                });
            }
            assert_eq!(lower.status, LpStatus::Optimal, "bounded feasible region");
            assert_eq!(upper.status, LpStatus::Optimal, "bounded feasible region");
            Ok(BoundsResult {
                lower: lower.value.expect("optimal"),
                upper: upper.value.expect("optimal"),
                parameters: assembled.system.parameters.clone(),
                lower_witness: lower.witness,
                upper_witness: upper.witness,
                method: BoundMethod::Lp,
            })
        }
    }
}

/// Average causal effect of `d` on `y` as a linear objective: the total
/// probability of helped-by-treatment responders minus hurt-by-treatment
/// responders.
fn ace_objective() -> Vec<Rational> {
    let mut c = vec![Rational::zero(); 16];
    for j in 0..4 {
        c[j * 4 + 1] = Rational::one();
        c[j * 4 + 2] = -Rational::one();
    }
    c
}

/// LP bounds on the average causal effect of treatment on outcome.
pub fn ace_bounds_lp(p: &IvDistribution) -> Result<BoundsResult, BoundsError> {
    let lp = LinearProgram::new(Sense::Min, ace_objective(), constraints::iv_system(p))?;
    let (lower, upper) = lp::optimize_both(&lp);
    if lower.status == LpStatus::Infeasible {
        return Err(BoundsError::InfeasibleObserved {
            cluster: vec!["d".into(), "y".into()],
            certificate: lower.certificate.unwrap_or_default(),
        });
    }
    Ok(BoundsResult {
        lower: lower.value.expect("optimal"),
        upper: upper.value.expect("optimal"),
        parameters: iv_parameter_names(),
        lower_witness: lower.witness,
        upper_witness: upper.witness,
        method: BoundMethod::Lp,
    })
}

/// Names of the 16 joint response cells, `r_d` major.
pub fn iv_parameter_names() -> Vec<String> {
    let mut names = Vec::with_capacity(16);
    for j in 0..4 {
        for k in 0..4 {
            names.push(format!("r_d={j},r_y={k}"));
        }
    }
    names
}

/// One closed-form bound term: `constant + sum(coeffs . entries)`, entries
/// in the fixed order `00.0, 01.0, 10.0, 11.0, 00.1, 01.1, 10.1, 11.1`.
#[derive(Debug, Clone, Copy)]
pub struct BoundTerm {
    constant: i8,
    coeffs: [i8; 8],
}

impl BoundTerm {
    fn evaluate(&self, p: &IvDistribution) -> Rational {
        let mut value = Rational::from_integer(self.constant.into());
        for (c, entry) in self.coeffs.iter().zip(p.entries()) {
            match c {
                1 => value += entry,
                -1 => value -= entry,
                _ => {}
            }
        }
        value
    }

    /// Renders the term over the entry labels, e.g. `1 - p01.1 - p10.0`.
    pub fn text(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if self.constant != 0 {
            parts.push(self.constant.to_string());
        }
        for (c, label) in self.coeffs.iter().zip(IV_ENTRY_LABELS) {
            match c {
                1 if parts.is_empty() => parts.push(format!("p{label}")),
                1 => parts.push(format!("+ p{label}")),
                -1 => parts.push(format!("- p{label}")),
                _ => {}
            }
        }
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        parts.join(" ")
    }
}

const fn term(constant: i8, coeffs: [i8; 8]) -> BoundTerm {
    BoundTerm { constant, coeffs }
}

/// Lower bound on ACE(d -> y): the maximum of these eight terms.
pub const ACE_LOWER_TERMS: [BoundTerm; 8] = [
    term(-1, [1, 0, 0, 0, 0, 0, 0, 1]),
    term(-1, [0, 0, 0, 1, 1, 0, 0, 0]),
    term(0, [0, -1, -1, 1, 0, 0, -1, -1]),
    term(0, [0, 0, -1, -1, 0, -1, -1, 1]),
    term(0, [0, 0, 0, 0, 0, -1, -1, 0]),
    term(0, [0, -1, -1, 0, 0, 0, 0, 0]),
    term(0, [-1, -1, 0, 0, 1, -1, -1, 0]),
    term(0, [1, -1, -1, 0, -1, -1, 0, 0]),
];

/// Upper bound on ACE(d -> y): the minimum of these eight terms.
pub const ACE_UPPER_TERMS: [BoundTerm; 8] = [
    term(1, [0, 0, -1, 0, 0, -1, 0, 0]),
    term(1, [0, -1, 0, 0, 0, 0, -1, 0]),
    term(0, [1, -1, 0, 1, 1, 1, 0, 0]),
    term(0, [1, 1, 0, 0, 1, -1, 0, 1]),
    term(0, [0, 0, 0, 0, 1, 0, 0, 1]),
    term(0, [1, 0, 0, 1, 0, 0, 0, 0]),
    term(0, [0, 0, 1, 1, 1, 0, -1, 1]),
    term(0, [1, 0, -1, 1, 0, 0, 1, 1]),
];

/// Bounds on the response under uniformly withheld treatment `P(y1*|do(d0))`.
pub const WITHHELD_LOWER_TERMS: [BoundTerm; 4] = [
    term(0, [0, 0, 1, 1, -1, 0, 0, -1]),
    term(0, [0, 0, 0, 0, 0, 0, 1, 0]),
    term(0, [0, 0, 1, 0, 0, 0, 0, 0]),
    term(0, [0, 1, 1, 0, -1, -1, 0, 0]),
];
pub const WITHHELD_UPPER_TERMS: [BoundTerm; 4] = [
    term(0, [0, 1, 1, 0, 0, 0, 1, 1]),
    term(1, [0, 0, 0, 0, -1, 0, 0, 0]),
    term(1, [-1, 0, 0, 0, 0, 0, 0, 0]),
    term(0, [0, 0, 1, 1, 0, 1, 1, 0]),
];

/// Bounds on the response under uniformly applied treatment `P(y1*|do(d1))`.
pub const APPLIED_LOWER_TERMS: [BoundTerm; 4] = [
    term(0, [0, 0, 0, 1, 0, 0, 0, 0]),
    term(0, [0, 0, 0, 0, 0, 0, 0, 1]),
    term(0, [-1, -1, 0, 0, 1, 0, 0, 1]),
    term(0, [0, -1, -1, 0, 0, 0, 1, 1]),
];
pub const APPLIED_UPPER_TERMS: [BoundTerm; 4] = [
    term(1, [0, 0, 0, 0, 0, -1, 0, 0]),
    term(1, [0, -1, 0, 0, 0, 0, 0, 0]),
    term(0, [1, 0, 0, 1, 0, 0, 1, 1]),
    term(0, [0, 0, 1, 1, 1, 0, 0, 1]),
];

/// Numerator bounds (before dividing by `p11.1`) for the probability that an
/// observed treated responder would still have responded had the assignment
/// been withheld (`do(z0)`).
pub const ASSIGNMENT_LIABILITY_LOWER_TERMS: [BoundTerm; 4] = [
    term(0, [0; 8]),
    term(0, [-1, 0, 0, 0, 0, 0, 0, 1]),
    term(0, [0, 0, 0, 1, -1, 0, -1, 0]),
    term(0, [0, 0, 1, 0, 0, -1, -1, 0]),
];

/// Numerator bounds for the counterpart with treatment itself withheld
/// (`do(d0)`).
pub const TREATMENT_LIABILITY_LOWER_TERMS: [BoundTerm; 3] = [
    term(0, [0; 8]),
    term(0, [-1, 0, 0, -1, 0, 0, 0, 1]),
    term(0, [0, 0, 1, 0, 0, -1, -1, 0]),
];

/// Shared numerator upper bound of both liability quantities.
pub const LIABILITY_UPPER_TERMS: [BoundTerm; 3] = [
    term(0, [0, 0, 0, 0, 0, 0, 0, 1]),
    term(0, [0, 0, 1, 1, 0, 0, 0, 0]),
    term(1, [-1, 0, 0, 0, 0, 0, -1, 0]),
];

/// A closed-form bound pair plus which printed term attains each endpoint
/// (first attaining term on ties).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicBounds {
    pub lower: Rational,
    pub upper: Rational,
    pub lower_term: usize,
    pub upper_term: usize,
    pub lower_term_text: String,
    pub upper_term_text: String,
}

fn max_term(terms: &[BoundTerm], p: &IvDistribution) -> (usize, Rational) {
    let mut best = (0usize, terms[0].evaluate(p));
    for (i, t) in terms.iter().enumerate().skip(1) {
        let v = t.evaluate(p);
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

fn min_term(terms: &[BoundTerm], p: &IvDistribution) -> (usize, Rational) {
    let mut best = (0usize, terms[0].evaluate(p));
    for (i, t) in terms.iter().enumerate().skip(1) {
        let v = t.evaluate(p);
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

fn symbolic_pair(
    lower_terms: &[BoundTerm],
    upper_terms: &[BoundTerm],
    p: &IvDistribution,
    scale: Option<&Rational>,
) -> SymbolicBounds {
    let (li, mut lower) = max_term(lower_terms, p);
    let (ui, mut upper) = min_term(upper_terms, p);
    if let Some(s) = scale {
        lower /= s;
        upper /= s;
    }
    SymbolicBounds {
        lower,
        upper,
        lower_term: li,
        upper_term: ui,
        lower_term_text: lower_terms[li].text(),
        upper_term_text: upper_terms[ui].text(),
    }
}

/// The published closed-form ACE bounds, evaluated exactly as printed.
pub fn symbolic_ace_bounds(p: &IvDistribution) -> SymbolicBounds {
    symbolic_pair(&ACE_LOWER_TERMS, &ACE_UPPER_TERMS, p, None)
}

/// Closed-form bounds on both treatment responses.
pub struct TreatmentResponseBounds {
    /// `P(y1* | do(d0))`
    pub withheld: SymbolicBounds,
    /// `P(y1* | do(d1))`
    pub applied: SymbolicBounds,
}

pub fn symbolic_treatment_response_bounds(p: &IvDistribution) -> TreatmentResponseBounds {
    TreatmentResponseBounds {
        withheld: symbolic_pair(&WITHHELD_LOWER_TERMS, &WITHHELD_UPPER_TERMS, p, None),
        applied: symbolic_pair(&APPLIED_LOWER_TERMS, &APPLIED_UPPER_TERMS, p, None),
    }
}

/// Which liability question: against the party that assigned exposure
/// (`do(z0)`) or the party behind the treatment itself (`do(d0)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiabilityParty {
    Marketer,
    Producer,
}

/// Closed-form bounds on `P(y1* | do(.), z1, d1, y1)`, the probability that
/// an exposed, treated, responding unit would have responded anyway.
pub fn symbolic_liability_bounds(
    p: &IvDistribution,
    which: LiabilityParty,
) -> Result<SymbolicBounds, BoundsError> {
    let p11_1 = p.entry(1, 1, 1);
    if p11_1.is_zero() {
        return Err(BoundsError::UndefinedConditional(
            "P(y=1, d=1 | z=1)".into(),
        ));
    }
    let bounds = match which {
        LiabilityParty::Marketer => symbolic_pair(
            &ASSIGNMENT_LIABILITY_LOWER_TERMS,
            &LIABILITY_UPPER_TERMS,
            p,
            Some(p11_1),
        ),
        LiabilityParty::Producer => symbolic_pair(
            &TREATMENT_LIABILITY_LOWER_TERMS,
            &LIABILITY_UPPER_TERMS,
            p,
            Some(p11_1),
        ),
    };
    Ok(bounds)
}

/// The liability query as a general LP over the instrumental-variables
/// model, for cross-checking the closed forms.
pub fn liability_bounds_lp(
    p: &IvDistribution,
    which: LiabilityParty,
) -> Result<BoundsResult, BoundsError> {
    let p11_1 = p.entry(1, 1, 1);
    if p11_1.is_zero() {
        return Err(BoundsError::UndefinedConditional(
            "P(y=1, d=1 | z=1)".into(),
        ));
    }
    let model = iv_model();
    let observed = observed_from_iv(p)?;
    let intervention = match which {
        LiabilityParty::Marketer => Intervention::new(&[("z", "0")]),
        LiabilityParty::Producer => Intervention::new(&[("d", "0")]),
    };
    let query = CounterfactualQuery::bound(
        rfm::values(&[("z", "1"), ("d", "1"), ("y", "1")]),
        intervention,
        rfm::values(&[("y", "1")]),
    );
    bound_query(&model, &observed, &query)
}

/// Which subpopulation effect: of the treatment on the outcome or of the
/// assignment on the outcome, both conditioned on `(z1, d1, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubpopTarget {
    TreatmentOnOutcome,
    AssignmentOnOutcome,
}

/// Subpopulation average causal effect given `(z1, d1, y1)`. The applied-arm
/// probability is exactly one (the antecedent agrees with the observation),
/// so the bounds are the complement of the matching liability bounds.
pub fn subpop_ace_bounds(
    p: &IvDistribution,
    target: SubpopTarget,
) -> Result<BoundsResult, BoundsError> {
    let which = match target {
        SubpopTarget::TreatmentOnOutcome => LiabilityParty::Producer,
        SubpopTarget::AssignmentOnOutcome => LiabilityParty::Marketer,
    };
    let liability = symbolic_liability_bounds(p, which)?;
    Ok(BoundsResult {
        lower: Rational::one() - &liability.upper,
        upper: Rational::one() - &liability.lower,
        parameters: Vec::new(),
        lower_witness: None,
        upper_witness: None,
        method: BoundMethod::Symbolic,
    })
}

/// Descriptive conditionals of the trial data.
#[derive(Debug, Clone, PartialEq)]
pub struct SanityStatistics {
    pub y1_given_d1: Rational,
    pub y1_given_d0: Rational,
    pub y1_given_z1: Rational,
    pub y1_given_z0: Rational,
}

/// `P(y1|d.)` and `P(y1|z.)` from the joint `P(y, d, z)`.
pub fn sanity_statistics(p: &IvDistribution) -> Result<SanityStatistics, BoundsError> {
    let p_z1 = p.p_z1().clone();
    let p_z0 = Rational::one() - &p_z1;
    let joint = |y: usize, d: usize| -> Rational {
        p.entry(y, d, 0) * &p_z0 + p.entry(y, d, 1) * &p_z1
    };
    let conditional = |num: Rational, den: Rational, what: &str| -> Result<Rational, BoundsError> {
        if den.is_zero() {
            return Err(BoundsError::UndefinedConditional(what.to_string()));
        }
        Ok(num / den)
    };
    let d1 = joint(0, 1) + joint(1, 1);
    let d0 = joint(0, 0) + joint(1, 0);
    let y1_given_d1 = conditional(joint(1, 1), d1, "P(d=1)")?;
    let y1_given_d0 = conditional(joint(1, 0), d0, "P(d=0)")?;
    let y1_given_z1 = conditional(
        p.entry(1, 0, 1) + p.entry(1, 1, 1),
        Rational::one(),
        "P(z=1)",
    )?;
    let y1_given_z0 = conditional(
        p.entry(1, 0, 0) + p.entry(1, 1, 0),
        Rational::one(),
        "P(z=0)",
    )?;
    Ok(SanityStatistics {
        y1_given_d1,
        y1_given_d0,
        y1_given_z1,
        y1_given_z0,
    })
}

/// True ACE of a known ground-truth response distribution: helped minus
/// hurt responders.
pub fn true_ace(q: &[Rational; 16]) -> Rational {
    let mut ace = Rational::zero();
    for j in 0..4 {
        ace += &q[j * 4 + 1];
        ace -= &q[j * 4 + 2];
    }
    ace
}
