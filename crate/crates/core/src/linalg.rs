//! Dense exact-rational Gaussian elimination, shared by the simplex solver,
//! the vertex-enumeration oracle and cluster point-identification.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Outcome of solving `Ax = b` over the rationals (no sign constraints).
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LinearSolve {
    Unique(Vec<Rational>),
    Underdetermined { rank: usize },
    /// `certificate` is a row combination `y` with `y^T A = 0`, `y^T b = 1`.
    Inconsistent { certificate: Vec<Rational> },
}

/// Row-reduces the augmented system while tracking the row transform, so an
/// inconsistency comes out with an exact certificate attached.
pub(crate) fn solve_equalities(
    rows: &[(Vec<Rational>, Rational)],
    n: usize,
) -> LinearSolve {
    let m = rows.len();
    let mut a: Vec<Vec<Rational>> = rows.iter().map(|(r, _)| r.clone()).collect();
    let mut b: Vec<Rational> = rows.iter().map(|(_, rhs)| rhs.clone()).collect();
    // transform[i] tracks how current row i combines the original rows
    let mut transform: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = vec![Rational::zero(); m];
            row[i] = Rational::one();
            row
        })
        .collect();

    let mut pivot_row = 0usize;
    let mut pivot_cols = Vec::new();
    for col in 0..n {
        let Some(found) = (pivot_row..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(pivot_row, found);
        b.swap(pivot_row, found);
        transform.swap(pivot_row, found);
        let inv = a[pivot_row][col].clone();
        for v in a[pivot_row].iter_mut() {
            *v /= &inv;
        }
        b[pivot_row] /= &inv;
        for v in transform[pivot_row].iter_mut() {
            *v /= &inv;
        }
        for r in 0..m {
            if r != pivot_row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..n {
                    let delta = &factor * &a[pivot_row][c];
                    a[r][c] -= delta;
                }
                let delta = &factor * &b[pivot_row];
                b[r] -= delta;
                for c in 0..m {
                    let delta = &factor * &transform[pivot_row][c];
                    transform[r][c] -= delta;
                }
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == m {
            break;
        }
    }
    let rank = pivot_row;

    for r in rank..m {
        if !b[r].is_zero() {
            let scale = b[r].clone();
            let certificate = transform[r].iter().map(|t| t / &scale).collect();
            return LinearSolve::Inconsistent { certificate };
        }
    }
    if rank < n {
        return LinearSolve::Underdetermined { rank };
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &col) in pivot_cols.iter().enumerate() {
        x[col] = b[row].clone();
    }
    LinearSolve::Unique(x)
}

/// Indices of a maximal independent subset of rows, plus the rank.
pub(crate) fn independent_rows(rows: &[(Vec<Rational>, Rational)], n: usize) -> Vec<usize> {
    let m = rows.len();
    let mut a: Vec<Vec<Rational>> = rows.iter().map(|(r, _)| r.clone()).collect();
    let mut order: Vec<usize> = (0..m).collect();
    let mut pivot_row = 0usize;
    let mut kept = Vec::new();
    for col in 0..n {
        let Some(found) = (pivot_row..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(pivot_row, found);
        order.swap(pivot_row, found);
        let pivot = a[pivot_row][col].clone();
        for r in pivot_row + 1..m {
            if !a[r][col].is_zero() {
                let factor = &a[r][col] / &pivot;
                for c in col..n {
                    let delta = &factor * &a[pivot_row][c];
                    a[r][c] -= delta;
                }
            }
        }
        kept.push(order[pivot_row]);
        pivot_row += 1;
        if pivot_row == m {
            break;
        }
    }
    kept.sort_unstable();
    kept
}

/// Solves a square system in place; `None` when singular.
pub(crate) fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let found = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, found);
        b.swap(col, found);
        let pivot = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= &pivot;
        }
        b[col] /= &pivot;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..n {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
                let delta = &factor * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some(b)
}
