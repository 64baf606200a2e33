//! Square assignment by successive shortest augmenting paths on reduced
//! costs (Hungarian method with potentials).
//!
//! The solver accepts any dual-feasible starting potentials. Rows and columns
//! that are already joined by a tight edge are matched greedily before any
//! augmentation, which makes re-solving a resampled problem with inherited
//! potentials much cheaper than a cold solve.

use super::plan::CostMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Optimal permutation with certifying potentials.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    /// `row_to_col[i]` is the column matched to row `i`.
    pub row_to_col: Vec<usize>,
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> Assignment<T> {
    /// `(1/m) sum_i c[i, sigma(i)]`, summed in row order.
    pub fn mean_cost(&self, cost: &CostMatrix<T>) -> T {
        let total: T = self.row_to_col.iter().enumerate().map(|(i, &j)| cost.get(i, j)).sum();
        total / T::of_usize(self.row_to_col.len())
    }
}

fn require_square<T: Scalar>(cost: &CostMatrix<T>) -> Result<usize> {
    if cost.rows() != cost.cols() {
        return Err(Error::SizeMismatch(format!(
            "assignment needs a square matrix, got {}x{}",
            cost.rows(),
            cost.cols()
        )));
    }
    Ok(cost.rows())
}

/// Cold solve, starting from row-then-column reduction potentials.
pub fn solve_assignment<T: Scalar>(cost: &CostMatrix<T>) -> Result<Assignment<T>> {
    let n = require_square(cost)?;
    let u: Vec<T> = (0..n)
        .map(|i| cost.row(i).iter().copied().fold(T::infinity(), T::min))
        .collect();
    let mut v = vec![T::infinity(); n];
    for (i, ui) in u.iter().enumerate() {
        for (j, c) in cost.row(i).iter().enumerate() {
            v[j] = v[j].min(*c - *ui);
        }
    }
    solve_assignment_warm(cost, u, v)
}

/// Solve from dual-feasible potentials `u_i + v_j <= c_ij`.
pub fn solve_assignment_warm<T: Scalar>(cost: &CostMatrix<T>, u0: Vec<T>, v0: Vec<T>) -> Result<Assignment<T>> {
    let n = require_square(cost)?;
    if u0.len() != n || v0.len() != n {
        return Err(Error::SizeMismatch(
            "potential length differs from matrix size".to_string(),
        ));
    }
    let tight = T::of(1e-12) * (T::one() + cost.max_entry());
    // 1-based column-to-row map, 0 meaning unmatched, as used by the row
    // reduction below
    let mut v = vec![T::zero(); n + 1];
    v[1..].copy_from_slice(&v0);
    let mut p = vec![0usize; n + 1];
    for (i, &ui) in u0.iter().enumerate() {
        let row = cost.row(i);
        for j in 1..=n {
            if p[j] == 0 && (row[j - 1] - ui) - v[j] <= tight {
                p[j] = i + 1;
                break;
            }
        }
    }

    augmenting_row_reduction(cost, &mut p, &mut v);

    // switch to 0-based column-to-row and row-to-column maps
    const NONE: usize = usize::MAX;
    let mut col_row = vec![NONE; n];
    let mut row_col = vec![NONE; n];
    for j in 1..=n {
        if p[j] != 0 {
            col_row[j - 1] = p[j] - 1;
            row_col[p[j] - 1] = j - 1;
        }
    }
    let mut v: Vec<T> = v[1..].to_vec();
    let mut d = vec![T::zero(); n];
    let mut pred = vec![0usize; n];
    let mut cols: Vec<usize> = (0..n).collect();
    for f in 0..n {
        if row_col[f] != NONE {
            continue;
        }
        let row = cost.row(f);
        for j in 0..n {
            d[j] = row[j] - v[j];
            pred[j] = f;
            cols[j] = j;
        }
        // cols[..low] are finalized, cols[low..up] sit at the current minimum
        let (mut low, mut up) = (0usize, 0usize);
        let mut min = T::zero();
        let mut last = 0usize;
        let end = 'search: loop {
            if up == low {
                last = low;
                min = d[cols[up]];
                up += 1;
                let start = up;
                for k in start..n {
                    let j = cols[k];
                    let h = d[j];
                    if h <= min {
                        if h < min {
                            up = low;
                            min = h;
                        }
                        cols[k] = cols[up];
                        cols[up] = j;
                        up += 1;
                    }
                }
                if !min.is_finite() {
                    return Err(Error::SolverFailure("no augmenting path".to_string()));
                }
                for &j in &cols[low..up] {
                    if col_row[j] == NONE {
                        break 'search j;
                    }
                }
            }
            let j1 = cols[low];
            low += 1;
            let i = col_row[j1];
            let row = cost.row(i);
            let h = row[j1] - v[j1] - min;
            let mut k = up;
            while k < n {
                let j = cols[k];
                let reduced = row[j] - v[j] - h;
                if reduced < d[j] {
                    pred[j] = i;
                    d[j] = reduced;
                    if reduced == min {
                        if col_row[j] == NONE {
                            break 'search j;
                        }
                        cols[k] = cols[up];
                        cols[up] = j;
                        up += 1;
                    }
                }
                k += 1;
            }
        };
        for &j in &cols[..last] {
            v[j] += d[j] - min;
        }
        let mut j = end;
        loop {
            let i = pred[j];
            col_row[j] = i;
            let next = row_col[i];
            row_col[i] = j;
            if i == f {
                break;
            }
            j = next;
        }
    }

    // row potentials as the reduced-cost minima keep every edge feasible and
    // every matched edge tight
    let u: Vec<T> = (0..n)
        .map(|i| {
            let row = cost.row(i);
            (0..n).map(|j| row[j] - v[j]).fold(T::infinity(), T::min)
        })
        .collect();
    Ok(Assignment {
        row_to_col: row_col,
        u,
        v,
    })
}

/// Jonker-Volgenant augmenting row reduction on 1-based `p` (column to
/// row) and column potentials `v`. Each free row takes the column of its
/// smallest reduced cost and lowers that column's potential to the second
/// smallest, evicting the previous owner. Column potentials only decrease,
/// so reduced costs only grow and every row keeps its matched column at its
/// row minimum.
fn augmenting_row_reduction<T: Scalar>(cost: &CostMatrix<T>, p: &mut [usize], v: &mut [T]) {
    let n = cost.rows();
    let mut owner_of = vec![0usize; n + 1];
    for j in 1..=n {
        if p[j] != 0 {
            owner_of[p[j]] = j;
        }
    }
    let mut free: Vec<usize> = (1..=n).filter(|&i| owner_of[i] == 0).collect();
    for _pass in 0..2 {
        let mut k = 0usize;
        let mut next = Vec::new();
        // bounds price wars between rows with nearly equal costs
        let mut budget = 8 * n + free.len();
        while k < free.len() {
            if budget == 0 {
                next.extend_from_slice(&free[k..]);
                break;
            }
            budget -= 1;
            let i = free[k];
            k += 1;
            let row = cost.row(i - 1);
            let (mut umin, mut usub) = (T::infinity(), T::infinity());
            let (mut j1, mut j2) = (0usize, 0usize);
            for j in 1..=n {
                let h = row[j - 1] - v[j];
                if h < usub {
                    if h >= umin {
                        usub = h;
                        j2 = j;
                    } else {
                        usub = umin;
                        j2 = j1;
                        umin = h;
                        j1 = j;
                    }
                }
            }
            if j1 == 0 {
                next.push(i);
                continue;
            }
            let mut i0 = p[j1];
            let lowered = umin < usub && usub.is_finite();
            if lowered {
                v[j1] -= usub - umin;
            } else if i0 != 0 && j2 != 0 {
                j1 = j2;
                i0 = p[j1];
            }
            p[j1] = i;
            owner_of[i] = j1;
            if i0 != 0 {
                owner_of[i0] = 0;
                if lowered {
                    k -= 1;
                    free[k] = i0;
                } else {
                    next.push(i0);
                }
            }
        }
        free = next;
        if free.is_empty() {
            break;
        }
    }
}
