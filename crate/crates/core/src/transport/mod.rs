//! Distances between measures and between laws of measures: 1-D `w1`,
//! total variation, bounded Lipschitz `beta`, exact discrete optimal
//! transport and the plug-in meta-distance `W1`.

mod assignment;
mod distance;
mod lipschitz;
mod network;
mod plan;
pub mod simplex;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use assignment::{solve_assignment, solve_assignment_warm, Assignment};
pub use distance::{tv_finite, w1_real, w1_scalar_samples};
pub use lipschitz::{bounded_lipschitz, bounded_lipschitz_certificate, bounded_lipschitz_lp, LipschitzDual};
pub use network::solve_transportation;
pub use plan::{verify_plan, CostMatrix, Duals, PlanCheck, PlanDefect, PlanEntry, TransportPlan};

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, SpaceTag, Support};
use crate::scalar::Scalar;

/// Ground distance between two measures used inside the meta-distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ground {
    #[serde(rename = "TV", alias = "tv")]
    Tv,
    #[serde(rename = "BL", alias = "bl")]
    Bl,
    /// Unbounded; only meaningful for laws of scalar pushforwards.
    #[serde(rename = "W1REAL", alias = "w1real")]
    W1Real,
}

impl Ground {
    pub fn accepts(self, space: SpaceTag) -> bool {
        matches!(
            (self, space),
            (Ground::Tv, SpaceTag::FiniteAlphabet { .. })
                | (Ground::Bl, SpaceTag::RealLine)
                | (Ground::Bl, SpaceTag::Euclidean { .. })
                | (Ground::W1Real, SpaceTag::RealLine)
        )
    }
}

pub fn ground_distance<T: Scalar>(ground: Ground, p: &AtomicMeasure<T>, q: &AtomicMeasure<T>) -> Result<T> {
    p.require_space(q)?;
    if !ground.accepts(p.space()) {
        return Err(Error::SpaceMismatch(format!(
            "{ground:?} ground metric is not defined on {}",
            p.space()
        )));
    }
    match ground {
        Ground::Tv => tv_finite(p, q),
        Ground::Bl => Ok(bounded_lipschitz(p, q)?.0),
        Ground::W1Real => w1_real(p, q),
    }
}

fn is_uniform<T: Scalar>(w: &[T], target: T) -> bool {
    let tol = T::epsilon() * T::of(8.0) * target;
    w.iter().all(|x| (*x - target).abs() <= tol)
}

/// Exact optimal plan. Uniform square problems go to the assignment solver,
/// everything else to the transportation simplex.
pub fn solve_discrete_ot<T: Scalar>(cost: &CostMatrix<T>, a: &[T], b: &[T]) -> Result<TransportPlan<T>> {
    network::validate_marginals(cost, a, b)?;
    let m = cost.rows();
    let unit = T::one() / T::of_usize(m);
    if m == cost.cols() && is_uniform(a, unit) && is_uniform(b, unit) {
        let sol = solve_assignment(cost)?;
        let coupling = sol
            .row_to_col
            .iter()
            .enumerate()
            .map(|(row, &col)| PlanEntry { row, col, mass: unit })
            .collect();
        return Ok(TransportPlan {
            coupling,
            cost: sol.mean_cost(cost),
            row_marginal: a.to_vec(),
            col_marginal: b.to_vec(),
            duals: Duals { u: sol.u, v: sol.v },
        });
    }
    solve_transportation(cost, a, b)
}

/// Classes of bitwise-identical measures.
fn classes<T: Scalar>(ms: &[AtomicMeasure<T>]) -> (Vec<usize>, Vec<usize>) {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut reps = Vec::new();
    let mut class_of = Vec::with_capacity(ms.len());
    for (i, m) in ms.iter().enumerate() {
        let mut key: Vec<u64> = Vec::with_capacity(2 * m.len() + 1);
        match m.support() {
            Support::Labels(ls) => key.extend(ls.iter().map(|&l| l as u64)),
            Support::Scalars(xs) => key.extend(xs.iter().map(|x| x.to_f64_lossy().to_bits())),
            Support::Vectors { coords, .. } => key.extend(coords.iter().map(|x| x.to_f64_lossy().to_bits())),
        }
        key.push(u64::MAX);
        key.extend(m.weights().iter().map(|w| w.to_f64_lossy().to_bits()));
        let next = reps.len();
        let c = *index.entry(key).or_insert_with(|| {
            reps.push(i);
            next
        });
        class_of.push(c);
    }
    (class_of, reps)
}

/// Problems whose smaller side has at most this many distinct measures are
/// solved as transportation problems over the distinct measures.
const FEW_CLASSES: usize = 32;

/// Plug-in estimate of `W1(law(ps), law(qs))`: optimal matching of the two
/// samples of measures under a ground distance, with enough state kept to
/// re-solve bootstrap resamples cheaply.
#[derive(Debug, Clone)]
pub struct MetaW1<T> {
    pub value: T,
    m: usize,
    row_class: Vec<usize>,
    col_class: Vec<usize>,
    cost: CostMatrix<T>,
    potentials: Option<(Vec<T>, Vec<T>)>,
}

impl<T: Scalar> MetaW1<T> {
    pub fn solve(ps: &[AtomicMeasure<T>], qs: &[AtomicMeasure<T>], ground: Ground) -> Result<Self> {
        if ps.len() != qs.len() {
            return Err(Error::SizeMismatch(format!(
                "{} versus {} measures",
                ps.len(),
                qs.len()
            )));
        }
        if ps.is_empty() {
            return Err(Error::EmptySample);
        }
        let m = ps.len();
        let (row_class, row_reps) = classes(ps);
        let (col_class, col_reps) = classes(qs);
        let entries: Vec<T> = row_reps
            .par_iter()
            .map(|&i| {
                col_reps
                    .iter()
                    .map(|&j| ground_distance(ground, &ps[i], &qs[j]))
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<Vec<Vec<T>>>>()?
            .concat();
        let cost = CostMatrix::new(row_reps.len(), col_reps.len(), entries)?;
        let mut out = Self {
            value: T::zero(),
            m,
            row_class,
            col_class,
            cost,
            potentials: None,
        };
        if out.few_classes() {
            let rows: Vec<usize> = (0..m).collect();
            out.value = out.solve_classes(&rows, &rows)?;
        } else {
            let full = out.expand(&(0..m).collect::<Vec<_>>(), &(0..m).collect::<Vec<_>>())?;
            let sol = solve_assignment(&full)?;
            out.value = sol.mean_cost(&full);
            out.potentials = Some((sol.u, sol.v));
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Ground-distance matrix between distinct measures.
    pub fn class_cost(&self) -> &CostMatrix<T> {
        &self.cost
    }

    fn few_classes(&self) -> bool {
        self.cost.rows().min(self.cost.cols()) <= FEW_CLASSES
    }

    fn expand(&self, rows: &[usize], cols: &[usize]) -> Result<CostMatrix<T>> {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            let r = self.cost.row(self.row_class[i]);
            entries.extend(cols.iter().map(|&j| r[self.col_class[j]]));
        }
        CostMatrix::new(rows.len(), cols.len(), entries)
    }

    fn solve_classes(&self, rows: &[usize], cols: &[usize]) -> Result<T> {
        let count = |idx: &[usize], class: &[usize], n: usize| {
            let mut c = vec![0usize; n];
            for &i in idx {
                c[class[i]] += 1;
            }
            c
        };
        let rc = count(rows, &self.row_class, self.cost.rows());
        let cc = count(cols, &self.col_class, self.cost.cols());
        let ri: Vec<usize> = (0..rc.len()).filter(|&k| rc[k] > 0).collect();
        let ci: Vec<usize> = (0..cc.len()).filter(|&k| cc[k] > 0).collect();
        let sub = CostMatrix::from_fn(ri.len(), ci.len(), |a, b| Ok(self.cost.get(ri[a], ci[b])))?;
        let total = T::of_usize(rows.len());
        let a: Vec<T> = ri.iter().map(|&k| T::of_usize(rc[k]) / total).collect();
        let b: Vec<T> = ci.iter().map(|&k| T::of_usize(cc[k]) / total).collect();
        Ok(solve_transportation(&sub, &a, &b)?.cost)
    }

    /// Plug-in value on a resample: `rows[a]` and `cols[b]` index the
    /// original samples (repeats allowed, equal lengths).
    pub fn resample(&self, rows: &[usize], cols: &[usize]) -> Result<T> {
        if rows.len() != cols.len() || rows.is_empty() {
            return Err(Error::SizeMismatch(
                "resample sides must have equal positive length".to_string(),
            ));
        }
        if rows.iter().chain(cols).any(|&i| i >= self.m) {
            return Err(Error::BadParameter("resample index out of range".to_string()));
        }
        match &self.potentials {
            Some((u, v)) if !self.few_classes() => {
                let sub = self.expand(rows, cols)?;
                let sol = solve_assignment_warm(
                    &sub,
                    rows.iter().map(|&i| u[i]).collect(),
                    cols.iter().map(|&j| v[j]).collect(),
                )?;
                Ok(sol.mean_cost(&sub))
            }
            _ => self.solve_classes(rows, cols),
        }
    }
}

/// Plug-in `W1` between the empirical laws of `ps` and `qs`.
pub fn meta_w1<T: Scalar>(ps: &[AtomicMeasure<T>], qs: &[AtomicMeasure<T>], ground: Ground) -> Result<T> {
    Ok(MetaW1::solve(ps, qs, ground)?.value)
}
