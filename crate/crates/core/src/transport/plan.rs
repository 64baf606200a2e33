use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Dense nonnegative cost matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> CostMatrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::SizeMismatch(format!(
                "{} entries for a {rows}x{cols} cost matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|c| !(c.is_finite() && **c >= T::zero())) {
            return Err(Error::BadParameter(format!(
                "cost entry {bad} is not finite and nonnegative"
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Result<T>>(rows: usize, cols: usize, mut f: F) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j)?);
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::SizeMismatch("ragged cost rows".to_string()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn max_entry(&self) -> T {
        self.entries.iter().copied().fold(T::zero(), T::max)
    }
}

/// One nonzero cell of a coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry<T> {
    pub row: usize,
    pub col: usize,
    pub mass: T,
}

/// Dual potentials with `u_i + v_j <= c_ij`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Duals<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> Duals<T> {
    pub fn objective(&self, a: &[T], b: &[T]) -> T {
        compensated_sum(
            self.u
                .iter()
                .zip(a)
                .map(|(u, a)| *u * *a)
                .chain(self.v.iter().zip(b).map(|(v, b)| *v * *b)),
        )
    }
}

/// A coupling between two discrete marginals, stored sparsely, with its cost
/// and the dual potentials that certify it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan<T> {
    pub coupling: Vec<PlanEntry<T>>,
    pub cost: T,
    pub row_marginal: Vec<T>,
    pub col_marginal: Vec<T>,
    pub duals: Duals<T>,
}

impl<T: Scalar> TransportPlan<T> {
    pub fn rows(&self) -> usize {
        self.row_marginal.len()
    }

    pub fn cols(&self) -> usize {
        self.col_marginal.len()
    }

    pub fn dense(&self) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); self.cols()]; self.rows()];
        for e in &self.coupling {
            out[e.row][e.col] += e.mass;
        }
        out
    }

    pub fn to_json(&self) -> String
    where
        T: Serialize,
    {
        serde_json::to_string_pretty(self).expect("plans serialize")
    }
}

/// Why a plan failed certification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanDefect {
    Shape,
    Marginal,
    Cost,
    Dual,
    Gap,
}

impl PlanDefect {
    pub fn code(self) -> &'static str {
        match self {
            PlanDefect::Shape => "shape",
            PlanDefect::Marginal => "marginal",
            PlanDefect::Cost => "cost",
            PlanDefect::Dual => "dual",
            PlanDefect::Gap => "gap",
        }
    }
}

/// Outcome of [`verify_plan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanCheck {
    pub ok: bool,
    pub reason: Option<PlanDefect>,
}

impl PlanCheck {
    fn pass() -> Self {
        Self { ok: true, reason: None }
    }

    fn fail(reason: PlanDefect) -> Self {
        Self {
            ok: false,
            reason: Some(reason),
        }
    }
}

/// Certifies a plan: marginals within the feasibility tolerance, dual
/// feasibility `u_i + v_j <= c_ij + tol`, and primal-dual gap within the
/// optimality tolerance.
pub fn verify_plan<T: Scalar>(plan: &TransportPlan<T>, cost: &CostMatrix<T>, duals: &Duals<T>) -> PlanCheck {
    let (m, n) = (cost.rows(), cost.cols());
    if plan.rows() != m || plan.cols() != n || duals.u.len() != m || duals.v.len() != n {
        return PlanCheck::fail(PlanDefect::Shape);
    }
    let feas = T::of(T::FEAS_TOL);
    let opt = T::of(T::OPT_TOL);
    let mut rs = vec![Vec::new(); m];
    let mut cs = vec![Vec::new(); n];
    let mut terms = Vec::with_capacity(plan.coupling.len());
    for e in &plan.coupling {
        if e.row >= m || e.col >= n {
            return PlanCheck::fail(PlanDefect::Shape);
        }
        if e.mass < -feas {
            return PlanCheck::fail(PlanDefect::Marginal);
        }
        rs[e.row].push(e.mass);
        cs[e.col].push(e.mass);
        terms.push(e.mass * cost.get(e.row, e.col));
    }
    let rows_ok = rs
        .into_iter()
        .zip(&plan.row_marginal)
        .all(|(v, a)| (compensated_sum(v) - *a).abs() <= feas);
    let cols_ok = cs
        .into_iter()
        .zip(&plan.col_marginal)
        .all(|(v, b)| (compensated_sum(v) - *b).abs() <= feas);
    if !rows_ok || !cols_ok {
        return PlanCheck::fail(PlanDefect::Marginal);
    }
    let primal = compensated_sum(terms);
    if (primal - plan.cost).abs() > feas {
        return PlanCheck::fail(PlanDefect::Cost);
    }
    for i in 0..m {
        let ui = duals.u[i];
        for (j, c) in cost.row(i).iter().enumerate() {
            if ui + duals.v[j] > *c + opt {
                return PlanCheck::fail(PlanDefect::Dual);
            }
        }
    }
    let dual = duals.objective(&plan.row_marginal, &plan.col_marginal);
    if primal - dual > opt {
        return PlanCheck::fail(PlanDefect::Gap);
    }
    PlanCheck::pass()
}
