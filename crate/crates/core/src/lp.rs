//! Exact-rational linear programming over `{x : Ax = b, x >= 0}`.
//!
//! Two-phase simplex with Bland's rule. No floating point and no tolerances:
//! an optimal witness satisfies every equality with zero residual and the
//! reported value is `c . witness` exactly. Redundant equality rows are
//! detected in phase 1 (artificial stays basic at zero with an all-zero row)
//! and dropped, so callers never manage rank.
//!
//! `enumerate_vertices` is an independent oracle for desk-scale problems: it
//! enumerates every basic feasible solution directly from column subsets,
//! which is what the property suites compare the simplex against.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("objective has {objective} coefficients but a constraint row has {row}")]
    DimensionMismatch { objective: usize, row: usize },
    #[error(
        "vertex enumeration refused: {n} variables / {m} rows exceed the caps of 20 and 12"
    )]
    OracleCapExceeded { n: usize, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

/// `optimize c.x  subject to  Ax = b, x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub equalities: Vec<(Vec<Rational>, Rational)>,
}

impl LinearProgram {
    pub fn new(
        sense: Sense,
        objective: Vec<Rational>,
        equalities: Vec<(Vec<Rational>, Rational)>,
    ) -> Result<Self, LpError> {
        for (row, _) in &equalities {
            if row.len() != objective.len() {
                return Err(LpError::DimensionMismatch {
                    objective: objective.len(),
                    row: row.len(),
                });
            }
        }
        Ok(LinearProgram {
            sense,
            objective,
            equalities,
        })
    }

    pub fn dimension(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal objective value; `None` unless optimal.
    pub value: Option<Rational>,
    /// A basic feasible solution attaining the optimum.
    pub witness: Option<Vec<Rational>>,
    /// On infeasibility: `y` with `y^T A <= 0` componentwise and `y^T b > 0`.
    pub certificate: Option<Vec<Rational>>,
    /// Total simplex pivots across both phases.
    pub iterations: usize,
}

struct Tableau {
    /// rows[i] has `cols` coefficients followed by the rhs
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
    reduced: Vec<Rational>,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &inv;
        }
        for r in 0..self.rows.len() {
            if r != row && !self.rows[r][col].is_zero() {
                let factor = self.rows[r][col].clone();
                for c in 0..=self.cols {
                    let delta = &factor * &self.rows[row][c];
                    self.rows[r][c] -= delta;
                }
            }
        }
        if !self.reduced[col].is_zero() {
            let factor = self.reduced[col].clone();
            for c in 0..self.cols {
                let delta = &factor * &self.rows[row][c];
                self.reduced[c] -= delta;
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Bland's rule: entering column is the lowest index with a negative
    /// reduced cost; leaving row is the ratio-test winner with the lowest
    /// basic variable index. Returns false on unboundedness.
    fn run_simplex(&mut self, allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let Some(col) = (0..self.cols)
                .find(|&j| allowed(j) && self.reduced[j].is_negative())
            else {
                return true;
            };
            let mut leave: Option<usize> = None;
            let mut best: Option<Rational> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][col].is_positive() {
                    let ratio = &self.rows[r][self.cols] / &self.rows[r][col];
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            ratio < *b
                                || (ratio == *b
                                    && self.basis[r] < self.basis[leave.unwrap()])
                        }
                    };
                    if better {
                        best = Some(ratio);
                        leave = Some(r);
                    }
                }
            }
            match leave {
                Some(r) => self.pivot(r, col),
                None => return false,
            }
        }
    }

    fn witness(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (r, &col) in self.basis.iter().enumerate() {
            if col < n {
                x[col] = self.rows[r][self.cols].clone();
            }
        }
        x
    }
}

/// Solves the program with a two-phase simplex over exact rationals.
pub fn solve(lp: &LinearProgram) -> LpSolution {
    let n = lp.dimension();
    let m = lp.equalities.len();
    let minimize: Vec<Rational> = match lp.sense {
        Sense::Min => lp.objective.clone(),
        Sense::Max => lp.objective.iter().map(|c| -c).collect(),
    };

    // Phase 1: minimize the sum of artificials from the all-artificial basis.
    let mut flipped = vec![false; m];
    let cols = n + m;
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, (a, b)) in lp.equalities.iter().enumerate() {
        let flip = b.is_negative();
        flipped[i] = flip;
        let mut row: Vec<Rational> = Vec::with_capacity(cols + 1);
        for v in a {
            row.push(if flip { -v } else { v.clone() });
        }
        for j in 0..m {
            row.push(if j == i { Rational::one() } else { Rational::zero() });
        }
        row.push(if flip { -b } else { b.clone() });
        rows.push(row);
    }
    let mut reduced = vec![Rational::zero(); cols];
    for (j, r) in reduced.iter_mut().enumerate().take(n) {
        *r = -rows.iter().map(|row| &row[j]).sum::<Rational>();
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        cols,
        reduced,
        pivots: 0,
    };
    t.run_simplex(&|_| true);

    let infeasibility: Rational = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &col)| col >= n)
        .map(|(r, _)| t.rows[r][t.cols].clone())
        .sum();
    if infeasibility.is_positive() {
        // Farkas certificate from the artificial reduced costs.
        let mut y: Vec<Rational> = (0..m)
            .map(|i| Rational::one() - &t.reduced[n + i])
            .collect();
        for (i, flip) in flipped.iter().enumerate() {
            if *flip {
                y[i] = -&y[i];
            }
        }
        debug_assert!(verify_farkas(&lp.equalities, &y));
        return LpSolution {
            status: LpStatus::Infeasible,
            value: None,
            witness: None,
            certificate: Some(y),
            iterations: t.pivots,
        };
    }

    // Drive leftover artificials out of the basis; an all-zero row is a
    // redundant original equality and gets dropped.
    let mut drop_rows = Vec::new();
    for r in 0..t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => drop_rows.push(r),
            }
        }
    }
    for &r in drop_rows.iter().rev() {
        t.rows.remove(r);
        t.basis.remove(r);
    }

    // Phase 2 on the original objective, artificial columns barred.
    for row in &mut t.rows {
        for j in n..cols {
            row[j] = Rational::zero();
        }
    }
    let mut reduced = minimize.clone();
    reduced.resize(cols, Rational::zero());
    for (r, &b) in t.basis.iter().enumerate() {
        if !minimize[b].is_zero() {
            let factor = minimize[b].clone();
            for j in 0..cols {
                let delta = &factor * &t.rows[r][j];
                reduced[j] -= delta;
            }
        }
    }
    t.reduced = reduced;
    if !t.run_simplex(&|j| j < n) {
        return LpSolution {
            status: LpStatus::Unbounded,
            value: None,
            witness: None,
            certificate: None,
            iterations: t.pivots,
        };
    }

    let witness = t.witness(n);
    let value: Rational = lp
        .objective
        .iter()
        .zip(&witness)
        .map(|(c, x)| c * x)
        .sum();
    LpSolution {
        status: LpStatus::Optimal,
        value: Some(value),
        witness: Some(witness),
        certificate: None,
        iterations: t.pivots,
    }
}

fn verify_farkas(equalities: &[(Vec<Rational>, Rational)], y: &[Rational]) -> bool {
    let Some(n) = equalities.first().map(|(a, _)| a.len()) else {
        return false;
    };
    for j in 0..n {
        let dot: Rational = y
            .iter()
            .zip(equalities)
            .map(|(yi, (a, _))| yi * &a[j])
            .sum();
        if dot.is_positive() {
            return false;
        }
    }
    let rhs: Rational = y.iter().zip(equalities).map(|(yi, (_, b))| yi * b).sum();
    rhs.is_positive()
}

/// Minimum and maximum of the same objective over the same feasible set.
pub fn optimize_both(lp: &LinearProgram) -> (LpSolution, LpSolution) {
    let mut min_lp = lp.clone();
    min_lp.sense = Sense::Min;
    let mut max_lp = lp.clone();
    max_lp.sense = Sense::Max;
    (solve(&min_lp), solve(&max_lp))
}

/// Every distinct basic feasible solution of `{Ax = b, x >= 0}`, exact and
/// deduplicated. Independent of the simplex path by construction.
pub fn enumerate_vertices(
    equalities: &[(Vec<Rational>, Rational)],
    n: usize,
) -> Result<Vec<Vec<Rational>>, LpError> {
    let m = equalities.len();
    if n > 20 || m > 12 {
        return Err(LpError::OracleCapExceeded { n, m });
    }
    match linalg::solve_equalities(equalities, n) {
        linalg::LinearSolve::Inconsistent { .. } => return Ok(Vec::new()),
        linalg::LinearSolve::Unique(_) | linalg::LinearSolve::Underdetermined { .. } => {}
    }
    let kept = linalg::independent_rows(equalities, n);
    let rank = kept.len();
    let reduced: Vec<&(Vec<Rational>, Rational)> =
        kept.iter().map(|&i| &equalities[i]).collect();

    let mut vertices = Vec::new();
    if rank == 0 {
        // no effective equalities: the only basic feasible solution is 0
        vertices.push(vec![Rational::zero(); n]);
        return Ok(vertices);
    }
    let mut subset: Vec<usize> = (0..rank).collect();
    loop {
        let a: Vec<Vec<Rational>> = reduced
            .iter()
            .map(|(row, _)| subset.iter().map(|&j| row[j].clone()).collect())
            .collect();
        let b: Vec<Rational> = reduced.iter().map(|(_, b)| b.clone()).collect();
        if let Some(solution) = linalg::solve_square(a, b) {
            if solution.iter().all(|v| !v.is_negative()) {
                let mut x = vec![Rational::zero(); n];
                for (&j, v) in subset.iter().zip(solution) {
                    x[j] = v;
                }
                let satisfies_all = equalities.iter().all(|(row, rhs)| {
                    let dot: Rational = row.iter().zip(&x).map(|(a, v)| a * v).sum();
                    dot == *rhs
                });
                if satisfies_all {
                    vertices.push(x);
                }
            }
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}

/// Advances to the next lexicographic `k`-combination of `0..n`.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
