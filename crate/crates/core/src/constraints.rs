//! Translation of a probabilistic specification into linear equality
//! constraints on the response-function distributions.
//!
//! For a complete model every variable is its own cluster and contributes
//! one equality per (value, parent configuration): the observed conditional
//! equals the total probability of the response functions that produce that
//! value in that configuration. A two-variable cluster contributes one
//! equality per (value pair, reduced-parent configuration) on the joint
//! response distribution. All generated coefficients are exactly 0 or 1.
//!
//! Fixed orderings (nowhere implied by the formulas, so pinned here):
//! - parameters: joint response cells in lexicographic order, first cluster
//!   member most significant;
//! - rows: reduced-parent configurations outer (lexicographic), child value
//!   configurations inner with the first cluster member varying fastest.
//!
//! On the instrumental-variables model these choices make the generated
//! system row-for-row equal to the fixed 8x16 matrix `iv_constraint_matrix`.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg;
use crate::lp::{self, LinearProgram, LpStatus, Sense};
use crate::observed::{
    reduced_parents, IvDistribution, ObservedConditionals, Relation, SubjectiveConstraint,
};
use crate::rational::Rational;
use crate::rfm::{CausalModel, ModelError, ResponseFunctionTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstraintError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("value index {index} out of range for `{variable}`")]
    ValueOutOfRange { variable: String, index: usize },
    #[error(
        "cluster {0:?} couples multiple variables; build_complete_constraints handles \
         complete models only, use build_pair_constraints for coupled clusters"
    )]
    NotComplete(Vec<String>),
    #[error("expected a two-variable cluster, got {0:?}")]
    NotAPair(Vec<String>),
    #[error("clusters of {0} latent-coupled variables are unsupported (pairwise only)")]
    UnsupportedClusterSize(usize),
    #[error("cluster {0:?} is not part of the model")]
    UnknownCluster(Vec<String>),
    #[error("subjective constraint references cells of different clusters")]
    CrossClusterSubjective,
    #[error("subjective constraint cell {0:?} does not address a full cluster cell")]
    BadSubjectiveCell(String),
}

/// Linear equalities `A q = b` over named nonnegative parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraintSystem {
    pub parameters: Vec<String>,
    pub equalities: Vec<(Vec<Rational>, Rational)>,
    /// One human-readable label per equality row.
    pub labels: Vec<String>,
}

impl LinearConstraintSystem {
    fn push(&mut self, label: String, coeffs: Vec<Rational>, rhs: Rational) {
        self.equalities.push((coeffs, rhs));
        self.labels.push(label);
    }

    pub fn dimension(&self) -> usize {
        self.parameters.len()
    }

    /// Rank of the equality rows.
    pub fn rank(&self) -> usize {
        linalg::independent_rows(&self.equalities, self.parameters.len()).len()
    }
}

/// Parameter names for one cluster's joint response cells, lexicographic.
pub fn cluster_parameter_names(
    model: &CausalModel,
    cluster: &[String],
) -> Result<Vec<String>, ConstraintError> {
    let counts: Vec<usize> = cluster
        .iter()
        .map(|name| Ok(model.response_table(name)?.count()))
        .collect::<Result<_, ModelError>>()?;
    let total = model.cluster_cell_count(cluster)?;
    let mut names = Vec::with_capacity(total);
    let mut cell = vec![0usize; cluster.len()];
    for _ in 0..total {
        names.push(
            cluster
                .iter()
                .zip(&cell)
                .map(|(v, r)| format!("r_{v}={r}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        for pos in (0..cell.len()).rev() {
            cell[pos] += 1;
            if cell[pos] < counts[pos] {
                break;
            }
            cell[pos] = 0;
        }
    }
    Ok(names)
}

/// The characteristic function: 1 iff response `r` maps the given parent
/// values to `x_value`.
pub fn characteristic(
    table: &ResponseFunctionTable,
    r: usize,
    x_value: usize,
    pa_values: &[usize],
) -> Result<u8, ConstraintError> {
    if x_value >= table.domain_size() {
        return Err(ConstraintError::ValueOutOfRange {
            variable: table.variable.clone(),
            index: x_value,
        });
    }
    Ok(u8::from(table.mapping(r, pa_values)? == x_value))
}

fn mixed_radix(sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut current = vec![0usize; sizes.len()];
    for _ in 0..total {
        out.push(current.clone());
        for pos in (0..current.len()).rev() {
            current[pos] += 1;
            if current[pos] < sizes[pos] {
                break;
            }
            current[pos] = 0;
        }
    }
    out
}

fn cluster_index(model: &CausalModel, cluster: &[String]) -> Result<usize, ConstraintError> {
    model
        .clusters()
        .iter()
        .position(|c| c == cluster)
        .ok_or_else(|| ConstraintError::UnknownCluster(cluster.to_vec()))
}

/// Constraint system of one singleton cluster `{X}`: one equality per
/// (value, parent configuration) plus normalization.
fn singleton_system(
    model: &CausalModel,
    observed: &ObservedConditionals,
    cluster: &[String],
) -> Result<LinearConstraintSystem, ConstraintError> {
    let name = &cluster[0];
    let table = model.response_table(name)?;
    let variable = model.variable(name)?;
    let cond = observed
        .table_for(model, cluster)
        .expect("observed validated against model");
    let mut system = LinearConstraintSystem {
        parameters: cluster_parameter_names(model, cluster)?,
        equalities: Vec::new(),
        labels: Vec::new(),
    };
    let parent_sizes: Vec<usize> = variable
        .parents
        .iter()
        .map(|p| Ok(model.variable(p)?.domain.len()))
        .collect::<Result<_, ModelError>>()?;
    for (cfg_index, pa_values) in mixed_radix(&parent_sizes).into_iter().enumerate() {
        for x_value in 0..variable.domain.len() {
            let coeffs: Vec<Rational> = (0..table.count())
                .map(|r| {
                    characteristic(table, r, x_value, &pa_values)
                        .map(|t| Rational::from_integer(t.into()))
                })
                .collect::<Result<_, _>>()?;
            let label = if variable.parents.is_empty() {
                format!("P({name}={})", variable.domain[x_value])
            } else {
                let given: Vec<String> = variable
                    .parents
                    .iter()
                    .zip(&pa_values)
                    .map(|(p, &v)| {
                        format!("{p}={}", model.variable(p).unwrap().domain[v])
                    })
                    .collect();
                format!(
                    "P({name}={}|{})",
                    variable.domain[x_value],
                    given.join(",")
                )
            };
            system.push(label, coeffs, cond.probs[cfg_index][x_value].clone());
        }
    }
    system.push(
        format!("normalization({name})"),
        vec![Rational::one(); table.count()],
        Rational::one(),
    );
    Ok(system)
}

/// Constraint system of a two-variable cluster per the joint formulation:
/// `P(x_i, x_j | reduced parents) = sum q(r_i, r_j) t(r_i;...) t(r_j;...)`.
pub fn build_pair_constraints(
    model: &CausalModel,
    observed: &ObservedConditionals,
    cluster: &[String],
) -> Result<LinearConstraintSystem, ConstraintError> {
    if cluster.len() != 2 {
        if cluster.len() > 2 {
            return Err(ConstraintError::UnsupportedClusterSize(cluster.len()));
        }
        return Err(ConstraintError::NotAPair(cluster.to_vec()));
    }
    cluster_index(model, cluster)?;
    let cond = observed
        .table_for(model, cluster)
        .expect("observed validated against model");
    let reduced = reduced_parents(model, cluster)?;
    let reduced_sizes: Vec<usize> = reduced
        .iter()
        .map(|p| Ok(model.variable(p)?.domain.len()))
        .collect::<Result<_, ModelError>>()?;
    let member_tables: Vec<&ResponseFunctionTable> = cluster
        .iter()
        .map(|name| model.response_table(name))
        .collect::<Result<_, ModelError>>()?;
    let member_sizes: Vec<usize> = cluster
        .iter()
        .map(|name| Ok(model.variable(name)?.domain.len()))
        .collect::<Result<_, ModelError>>()?;
    let counts: Vec<usize> = member_tables.iter().map(|t| t.count()).collect();

    let mut system = LinearConstraintSystem {
        parameters: cluster_parameter_names(model, cluster)?,
        equalities: Vec::new(),
        labels: Vec::new(),
    };

    // child value pairs with the first member varying fastest
    let mut child_pairs: Vec<(usize, usize)> = Vec::new();
    for second in 0..member_sizes[1] {
        for first in 0..member_sizes[0] {
            child_pairs.push((first, second));
        }
    }

    // a parent of a member is either a reduced parent or the other member
    let parent_value = |parent: &String,
                        rp_values: &[usize],
                        pair: (usize, usize)|
     -> usize {
        if let Some(pos) = reduced.iter().position(|p| p == parent) {
            rp_values[pos]
        } else if *parent == cluster[0] {
            pair.0
        } else {
            pair.1
        }
    };

    for rp_values in mixed_radix(&reduced_sizes) {
        for &(x_first, x_second) in &child_pairs {
            let pa_first: Vec<usize> = model
                .variable(&cluster[0])?
                .parents
                .iter()
                .map(|p| parent_value(p, &rp_values, (x_first, x_second)))
                .collect();
            let pa_second: Vec<usize> = model
                .variable(&cluster[1])?
                .parents
                .iter()
                .map(|p| parent_value(p, &rp_values, (x_first, x_second)))
                .collect();
            let mut coeffs = Vec::with_capacity(counts[0] * counts[1]);
            for r_first in 0..counts[0] {
                let t_first =
                    characteristic(member_tables[0], r_first, x_first, &pa_first)?;
                for r_second in 0..counts[1] {
                    let t_second =
                        characteristic(member_tables[1], r_second, x_second, &pa_second)?;
                    coeffs.push(Rational::from_integer((t_first * t_second).into()));
                }
            }
            // reorder from (r_second inner) into parameter order: parameters
            // are lexicographic with the first member most significant, which
            // is exactly r_first-major — already matches.
            let row = rp_values
                .iter()
                .zip(&reduced)
                .map(|(&v, p)| format!("{p}={}", model.variable(p).unwrap().domain[v]))
                .collect::<Vec<_>>()
                .join(",");
            let label = format!(
                "P({}={},{}={}{}{})",
                cluster[0],
                model.variable(&cluster[0])?.domain[x_first],
                cluster[1],
                model.variable(&cluster[1])?.domain[x_second],
                if row.is_empty() { "" } else { "|" },
                row
            );
            let col = x_first * member_sizes[1] + x_second;
            let cfg_index = rp_values
                .iter()
                .zip(&reduced_sizes)
                .fold(0usize, |acc, (&v, &s)| acc * s + v);
            system.push(label, coeffs, cond.probs[cfg_index][col].clone());
        }
    }
    system.push(
        format!("normalization({})", cluster.join(",")),
        vec![Rational::one(); counts[0] * counts[1]],
        Rational::one(),
    );
    Ok(system)
}

/// Appends subjective rows targeting this cluster; inequalities get a slack
/// parameter appended to the system.
fn apply_subjective(
    model: &CausalModel,
    cluster: &[String],
    system: &mut LinearConstraintSystem,
    constraints: &[SubjectiveConstraint],
) -> Result<(), ConstraintError> {
    let counts: Vec<usize> = cluster
        .iter()
        .map(|name| Ok(model.response_table(name)?.count()))
        .collect::<Result<_, ModelError>>()?;
    for (k, constraint) in constraints.iter().enumerate() {
        let mut touches_cluster = None;
        for term in &constraint.terms {
            let mut names: Vec<&String> = term.cell.keys().collect();
            names.sort_by_key(|n| model.variable_index(n).unwrap_or(usize::MAX));
            let in_cluster = names.len() == cluster.len()
                && names.iter().zip(cluster).all(|(a, b)| **a == *b);
            match touches_cluster {
                None => touches_cluster = Some(in_cluster),
                Some(prev) if prev != in_cluster => {
                    return Err(ConstraintError::CrossClusterSubjective)
                }
                _ => {}
            }
        }
        if touches_cluster != Some(true) {
            continue;
        }
        let mut coeffs = vec![Rational::zero(); system.parameters.len()];
        for term in &constraint.terms {
            let mut cell = 0usize;
            for (name, &count) in cluster.iter().zip(&counts) {
                let r = *term.cell.get(name).ok_or_else(|| {
                    ConstraintError::BadSubjectiveCell(format!("{:?}", term.cell))
                })?;
                if r >= count {
                    return Err(ConstraintError::BadSubjectiveCell(format!(
                        "{:?}",
                        term.cell
                    )));
                }
                cell = cell * count + r;
            }
            coeffs[cell] += &term.coef;
        }
        match constraint.relation {
            Relation::Eq => {}
            Relation::Le | Relation::Ge => {
                system.parameters.push(format!("_slack{k}"));
                for (row, _) in system.equalities.iter_mut() {
                    row.push(Rational::zero());
                }
                coeffs.push(match constraint.relation {
                    Relation::Le => Rational::one(),
                    _ => -Rational::one(),
                });
            }
        }
        system.push(format!("subjective#{k}"), coeffs, constraint.rhs.clone());
    }
    Ok(())
}

/// Per-cluster constraint system (singleton or pair), subjective rows
/// included.
pub fn build_cluster_system(
    model: &CausalModel,
    observed: &ObservedConditionals,
    cluster: &[String],
) -> Result<LinearConstraintSystem, ConstraintError> {
    let mut system = match cluster.len() {
        1 => singleton_system(model, observed, cluster)?,
        2 => build_pair_constraints(model, observed, cluster)?,
        n => return Err(ConstraintError::UnsupportedClusterSize(n)),
    };
    apply_subjective(model, cluster, &mut system, observed.subjective())?;
    Ok(system)
}

/// Constraint systems for every cluster, in model cluster order.
pub fn cluster_systems(
    model: &CausalModel,
    observed: &ObservedConditionals,
) -> Result<Vec<LinearConstraintSystem>, ConstraintError> {
    model
        .clusters()
        .iter()
        .map(|cluster| build_cluster_system(model, observed, cluster))
        .collect()
}

/// Constraint system of a complete model (every variable its own cluster):
/// the per-variable systems concatenated block-diagonally.
pub fn build_complete_constraints(
    model: &CausalModel,
    observed: &ObservedConditionals,
) -> Result<LinearConstraintSystem, ConstraintError> {
    if let Some(cluster) = model.clusters().iter().find(|c| c.len() > 1) {
        return Err(ConstraintError::NotComplete(cluster.clone()));
    }
    let systems = cluster_systems(model, observed)?;
    let mut combined = LinearConstraintSystem {
        parameters: Vec::new(),
        equalities: Vec::new(),
        labels: Vec::new(),
    };
    let offsets: Vec<usize> = systems
        .iter()
        .scan(0usize, |acc, s| {
            let start = *acc;
            *acc += s.dimension();
            Some(start)
        })
        .collect();
    let total: usize = systems.iter().map(|s| s.dimension()).sum();
    for (system, offset) in systems.into_iter().zip(offsets) {
        combined.parameters.extend(system.parameters);
        for ((row, rhs), label) in system.equalities.into_iter().zip(system.labels) {
            let mut wide = vec![Rational::zero(); total];
            wide[offset..offset + row.len()].clone_from_slice(&row);
            combined.push(label, wide, rhs);
        }
    }
    Ok(combined)
}

/// The fixed 8x16 constraint matrix of the binary instrumental-variables
/// model: rows in entry order `00.0 .. 11.1`, columns over the joint
/// response cells `(r_d, r_y)` with `r_d` major.
pub fn iv_constraint_matrix() -> [[u8; 16]; 8] {
    let rows: [&[usize]; 8] = [
        // p00.0 = q00 + q01 + q10 + q11
        &[0, 1, 4, 5],
        // p01.0 = q20 + q22 + q30 + q32
        &[8, 10, 12, 14],
        // p10.0 = q02 + q03 + q12 + q13
        &[2, 3, 6, 7],
        // p11.0 = q21 + q23 + q31 + q33
        &[9, 11, 13, 15],
        // p00.1 = q00 + q01 + q20 + q21
        &[0, 1, 8, 9],
        // p01.1 = q10 + q12 + q30 + q32
        &[4, 6, 12, 14],
        // p10.1 = q02 + q03 + q22 + q23
        &[2, 3, 10, 11],
        // p11.1 = q11 + q13 + q31 + q33
        &[5, 7, 13, 15],
    ];
    let mut matrix = [[0u8; 16]; 8];
    for (row, cells) in matrix.iter_mut().zip(rows) {
        for &c in cells {
            row[c] = 1;
        }
    }
    matrix
}

/// `A q = p` rows (fixed matrix against the given entries) plus `sum q = 1`.
pub fn iv_system(p: &IvDistribution) -> Vec<(Vec<Rational>, Rational)> {
    let matrix = iv_constraint_matrix();
    let mut rows: Vec<(Vec<Rational>, Rational)> = matrix
        .iter()
        .zip(p.entries())
        .map(|(row, rhs)| {
            (
                row.iter()
                    .map(|&v| Rational::from_integer(v.into()))
                    .collect(),
                rhs.clone(),
            )
        })
        .collect();
    rows.push((vec![Rational::one(); 16], Rational::one()));
    rows
}

/// Exact pushforward `P q` of a 16-cell response distribution to the eight
/// observable entries.
pub fn iv_pushforward(q: &[Rational; 16]) -> [Rational; 8] {
    let matrix = iv_constraint_matrix();
    core::array::from_fn(|i| {
        matrix[i]
            .iter()
            .zip(q.iter())
            .filter(|(&m, _)| m == 1)
            .map(|(_, v)| v)
            .sum()
    })
}

/// Whether an observable distribution is the image of any response
/// distribution, decided by a phase-1 solve; both outcomes are certified.
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible { witness: Vec<Rational> },
    Infeasible { certificate: Vec<Rational> },
}

pub fn check_feasibility(p: &IvDistribution) -> Feasibility {
    let lp = LinearProgram::new(
        Sense::Min,
        vec![Rational::zero(); 16],
        iv_system(p),
    )
    .expect("fixed dimensions");
    let solution = lp::solve(&lp);
    match solution.status {
        LpStatus::Optimal => Feasibility::Feasible {
            witness: solution.witness.expect("optimal solution has witness"),
        },
        LpStatus::Infeasible => Feasibility::Infeasible {
            certificate: solution
                .certificate
                .expect("infeasible solution has certificate"),
        },
        LpStatus::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}
