//! Transportation simplex (network simplex on the bipartite transport graph)
//! for arbitrary marginals.

use super::plan::{CostMatrix, Duals, PlanEntry, TransportPlan};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

struct Basis<T> {
    m: usize,
    cells: Vec<(usize, usize, T)>,
    row_adj: Vec<Vec<usize>>,
    col_adj: Vec<Vec<usize>>,
    is_basic: Vec<bool>,
}

impl<T: Scalar> Basis<T> {
    fn northwest(a: &[T], b: &[T]) -> Self {
        let (m, n) = (a.len(), b.len());
        let mut basis = Basis {
            m,
            cells: Vec::with_capacity(m + n - 1),
            row_adj: vec![Vec::new(); m],
            col_adj: vec![Vec::new(); n],
            is_basic: vec![false; m * n],
        };
        let (mut i, mut j) = (0, 0);
        let (mut ra, mut rb) = (a[0], b[0]);
        loop {
            let x = ra.min(rb).max(T::zero());
            basis.insert(i, j, x, n);
            if i == m - 1 && j == n - 1 {
                break;
            }
            let move_row = j == n - 1 || (i < m - 1 && ra <= rb);
            if move_row {
                rb -= x;
                i += 1;
                ra = a[i];
            } else {
                ra -= x;
                j += 1;
                rb = b[j];
            }
        }
        basis
    }

    fn insert(&mut self, i: usize, j: usize, x: T, n: usize) {
        let idx = self.cells.len();
        self.cells.push((i, j, x));
        self.row_adj[i].push(idx);
        self.col_adj[j].push(idx);
        self.is_basic[i * n + j] = true;
    }

    fn replace(&mut self, slot: usize, i: usize, j: usize, x: T, n: usize) {
        let (oi, oj, _) = self.cells[slot];
        self.row_adj[oi].retain(|&c| c != slot);
        self.col_adj[oj].retain(|&c| c != slot);
        self.is_basic[oi * n + oj] = false;
        self.cells[slot] = (i, j, x);
        self.row_adj[i].push(slot);
        self.col_adj[j].push(slot);
        self.is_basic[i * n + j] = true;
    }

    /// Potentials with `u_i + v_j = c_ij` on basic cells, `u_0 = 0`.
    fn potentials(&self, cost: &CostMatrix<T>, u: &mut [T], v: &mut [T], seen: &mut [bool], stack: &mut Vec<usize>) {
        let m = self.m;
        seen.fill(false);
        stack.clear();
        u[0] = T::zero();
        seen[0] = true;
        stack.push(0);
        while let Some(node) = stack.pop() {
            if node < m {
                for &c in &self.row_adj[node] {
                    let (i, j, _) = self.cells[c];
                    if !seen[m + j] {
                        seen[m + j] = true;
                        v[j] = cost.get(i, j) - u[i];
                        stack.push(m + j);
                    }
                }
            } else {
                for &c in &self.col_adj[node - m] {
                    let (i, j, _) = self.cells[c];
                    if !seen[i] {
                        seen[i] = true;
                        u[i] = cost.get(i, j) - v[j];
                        stack.push(i);
                    }
                }
            }
        }
    }

    /// Basic cells on the tree path from column node `j` to row node `i`.
    fn path(&self, i: usize, j: usize, parent: &mut [usize], stack: &mut Vec<usize>) -> Vec<usize> {
        let m = self.m;
        parent.fill(usize::MAX);
        stack.clear();
        let root = i;
        parent[root] = usize::MAX - 1;
        stack.push(root);
        let target = m + j;
        while let Some(node) = stack.pop() {
            if node == target {
                break;
            }
            let adj = if node < m {
                &self.row_adj[node]
            } else {
                &self.col_adj[node - m]
            };
            for &c in adj {
                let (ci, cj, _) = self.cells[c];
                let other = if node < m { m + cj } else { ci };
                if parent[other] == usize::MAX {
                    parent[other] = c;
                    stack.push(other);
                }
            }
        }
        let mut out = Vec::new();
        let mut node = target;
        while node != root {
            let c = parent[node];
            out.push(c);
            let (ci, cj, _) = self.cells[c];
            node = if node < m { m + cj } else { ci };
        }
        out
    }
}

fn check_marginal<T: Scalar>(w: &[T], what: &str) -> Result<T> {
    if w.is_empty() {
        return Err(Error::BadMarginals(format!("{what} marginal is empty")));
    }
    if let Some(x) = w.iter().find(|x| !(x.is_finite() && **x >= T::zero())) {
        return Err(Error::BadMarginals(format!("{what} marginal has entry {x}")));
    }
    let s = compensated_sum(w.iter().copied());
    if (s - T::one()).abs() > T::of(T::FEAS_TOL) {
        return Err(Error::BadMarginals(format!("{what} marginal sums to {s}")));
    }
    Ok(s)
}

pub(crate) fn validate_marginals<T: Scalar>(cost: &CostMatrix<T>, a: &[T], b: &[T]) -> Result<()> {
    if a.len() != cost.rows() || b.len() != cost.cols() {
        return Err(Error::SizeMismatch(format!(
            "marginals of length {} and {} for a {}x{} cost matrix",
            a.len(),
            b.len(),
            cost.rows(),
            cost.cols()
        )));
    }
    check_marginal(a, "row")?;
    check_marginal(b, "column")?;
    Ok(())
}

/// Exact optimal plan for general marginals.
pub fn solve_transportation<T: Scalar>(cost: &CostMatrix<T>, a: &[T], b: &[T]) -> Result<TransportPlan<T>> {
    validate_marginals(cost, a, b)?;
    let (m, n) = (a.len(), b.len());
    let sa = compensated_sum(a.iter().copied());
    let sb = compensated_sum(b.iter().copied());
    let scale = sa / sb;
    let bb: Vec<T> = b.iter().map(|x| *x * scale).collect();

    let mut basis = Basis::northwest(a, &bb);
    let eps = T::epsilon() * T::of(64.0) * (T::one() + cost.max_entry());
    let mut u = vec![T::zero(); m];
    let mut v = vec![T::zero(); n];
    let mut seen = vec![false; m + n];
    let mut parent = vec![0usize; m + n];
    let mut stack = Vec::with_capacity(m + n);
    let max_iter = 10_000 + 200 * (m + n) * (m.min(n) + 1);
    let mut iter = 0usize;
    loop {
        basis.potentials(cost, &mut u, &mut v, &mut seen, &mut stack);
        let mut best = -eps;
        let mut enter = None;
        for i in 0..m {
            let row = cost.row(i);
            let ui = u[i];
            for j in 0..n {
                if basis.is_basic[i * n + j] {
                    continue;
                }
                let r = (row[j] - ui) - v[j];
                if r < best {
                    best = r;
                    enter = Some((i, j));
                }
            }
        }
        let Some((ei, ej)) = enter else { break };
        iter += 1;
        if iter > max_iter {
            return Err(Error::SolverFailure(format!(
                "transportation simplex exceeded {max_iter} pivots"
            )));
        }
        let path = basis.path(ei, ej, &mut parent, &mut stack);
        let mut theta = T::infinity();
        let mut leave = usize::MAX;
        for (k, &c) in path.iter().enumerate() {
            if k % 2 == 0 && basis.cells[c].2 < theta {
                theta = basis.cells[c].2;
                leave = c;
            }
        }
        for (k, &c) in path.iter().enumerate() {
            let x = &mut basis.cells[c].2;
            if k % 2 == 0 {
                *x = (*x - theta).max(T::zero());
            } else {
                *x += theta;
            }
        }
        basis.replace(leave, ei, ej, theta, n);
    }

    let mut coupling: Vec<PlanEntry<T>> = basis
        .cells
        .iter()
        .filter(|(_, _, x)| *x > T::zero())
        .map(|&(row, col, mass)| PlanEntry { row, col, mass })
        .collect();
    coupling.sort_by_key(|e| (e.row, e.col));
    let total = compensated_sum(coupling.iter().map(|e| e.mass * cost.get(e.row, e.col)));
    Ok(TransportPlan {
        coupling,
        cost: total,
        row_marginal: a.to_vec(),
        col_marginal: b.to_vec(),
        duals: Duals { u, v },
    })
}
