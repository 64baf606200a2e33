use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use super::functions::{PairFn, TestFn};
use super::Estimate;
use crate::error::{Error, Result};
use crate::measure::{AnalyticFamily, AtomicMeasure, Point, Sample, SpaceTag};
use crate::rng::RngState;

/// Deepest supported tree.
pub const POLYA_MAX_DEPTH: usize = 16;

/// Branch parameters `alpha_eps` for binary strings `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PolyaParams {
    /// Explicit table keyed by the binary string.
    Explicit { alpha: BTreeMap<String, f64> },
    /// `alpha_eps = c * |eps|^exponent`.
    LevelPower { c: f64, exponent: f64 },
}

/// Polya tree on the dyadic quantile partition of a continuous `base`,
/// sampled to `depth` levels; each leaf emits the image of its midpoint
/// under the base quantile function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyaTreeModel {
    pub base: AnalyticFamily,
    pub depth: usize,
    pub params: PolyaParams,
}

fn check_eps(eps: &str) -> Result<()> {
    if eps.chars().all(|c| c == '0' || c == '1') {
        Ok(())
    } else {
        Err(Error::BadParameter(format!("{eps:?} is not a binary string")))
    }
}

fn eps_string(level: usize, index: usize) -> String {
    (0..level)
        .map(|b| if (index >> (level - 1 - b)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl PolyaTreeModel {
    pub fn new(base: AnalyticFamily, depth: usize, params: PolyaParams) -> Result<Self> {
        let m = Self { base, depth, params };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.base.is_atomic() {
            return Err(Error::BadModel(
                "a Polya tree needs a continuous base distribution".to_string(),
            ));
        }
        if self.depth < 1 || self.depth > POLYA_MAX_DEPTH {
            return Err(Error::BadModel(format!(
                "depth must lie in 1..={POLYA_MAX_DEPTH}, got {}",
                self.depth
            )));
        }
        match &self.params {
            PolyaParams::LevelPower { c, exponent } => {
                if !(*c > 0.0 && c.is_finite() && exponent.is_finite()) {
                    return Err(Error::BadModel(
                        "level-power parameters must be finite with c > 0".to_string(),
                    ));
                }
            }
            PolyaParams::Explicit { alpha } => {
                for (eps, a) in alpha {
                    check_eps(eps)?;
                    if !(*a > 0.0 && a.is_finite()) {
                        return Err(Error::BadModel(format!("alpha_{eps} = {a} is not positive")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `alpha_eps`.
    pub fn alpha(&self, eps: &str) -> Result<f64> {
        check_eps(eps)?;
        let a = match &self.params {
            PolyaParams::Explicit { alpha } => *alpha.get(eps).ok_or_else(|| Error::ParamMissing(eps.to_string()))?,
            PolyaParams::LevelPower { c, exponent } => c * (eps.len() as f64).powf(*exponent),
        };
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::BadModel(format!("alpha_{eps} = {a} is not positive")));
        }
        Ok(a)
    }

    /// `levels[l - 1][j] = alpha` of the node `j` at level `l`.
    fn levels(&self) -> Result<Vec<Vec<f64>>> {
        (1..=self.depth)
            .map(|l| (0..1usize << l).map(|j| self.alpha(&eps_string(l, j))).collect())
            .collect()
    }

    /// `P{xi in B_eps} = prod_i alpha_{e_1..e_i} / (alpha_{e_1..e_{i-1}0} + alpha_{e_1..e_{i-1}1})`.
    pub fn marginal(&self, eps: &str) -> Result<f64> {
        check_eps(eps)?;
        if eps.len() > self.depth {
            return Err(Error::BadParameter(format!(
                "|eps| = {} exceeds depth {}",
                eps.len(),
                self.depth
            )));
        }
        let mut p = 1.0;
        for i in 1..=eps.len() {
            let parent = &eps[..i - 1];
            let num = self.alpha(&eps[..i])?;
            let den = self.alpha(&format!("{parent}0"))? + self.alpha(&format!("{parent}1"))?;
            p *= num / den;
        }
        Ok(p)
    }

    fn leaves(&self) -> usize {
        1 << self.depth
    }

    pub fn leaf_point(&self, leaf: usize) -> f64 {
        let mid = (2 * leaf + 1) as f64 / (1u64 << (self.depth + 1)) as f64;
        self.base.quantile(mid)
    }

    fn leaf_of(&self, x: f64) -> usize {
        let u = self.base.cdf(x);
        let idx = (u * self.leaves() as f64).floor();
        (idx.max(0.0) as usize).min(self.leaves() - 1)
    }

    /// Node parameters updated with the counts of `history`.
    fn updated(&self, history: &Sample<f64>) -> Result<Vec<Vec<f64>>> {
        let mut lv = self.levels()?;
        for x in history.scalars()? {
            let leaf = self.leaf_of(x);
            for l in 1..=self.depth {
                lv[l - 1][leaf >> (self.depth - l)] += 1.0;
            }
        }
        Ok(lv)
    }

    fn leaf_probs(&self, lv: &[Vec<f64>]) -> Vec<f64> {
        let mut probs = vec![1.0];
        for a in lv {
            let mut next = Vec::with_capacity(probs.len() * 2);
            for (p, pair) in probs.iter().zip(a.chunks(2)) {
                let s = pair[0] + pair[1];
                next.push(p * pair[0] / s);
                next.push(p * pair[1] / s);
            }
            probs = next;
        }
        probs
    }

    fn random_leaf_masses(&self, lv: &[Vec<f64>], rng: &mut RngState) -> Result<Vec<f64>> {
        let mut masses = vec![1.0];
        for a in lv {
            let mut next = Vec::with_capacity(masses.len() * 2);
            for (m, pair) in masses.iter().zip(a.chunks(2)) {
                let y = Beta::new(pair[0], pair[1])
                    .map_err(|e| Error::BadModel(e.to_string()))?
                    .sample(rng);
                next.push(m * y);
                next.push(m * (1.0 - y));
            }
            masses = next;
        }
        Ok(masses)
    }

    fn measure(&self, masses: &[f64]) -> Result<AtomicMeasure<f64>> {
        AtomicMeasure::normalized(
            SpaceTag::RealLine,
            masses
                .iter()
                .enumerate()
                .map(|(i, &w)| (Point::Scalar(self.leaf_point(i)), w))
                .collect(),
        )
    }

    pub fn prior_draw(&self, rng: &mut RngState) -> Result<AtomicMeasure<f64>> {
        let lv = self.levels()?;
        self.measure(&self.random_leaf_masses(&lv, rng)?)
    }

    /// Conjugate update `alpha_eps + #{i : xi_i in B_eps}`, then a draw.
    pub fn posterior_draw(&self, history: &Sample<f64>, rng: &mut RngState) -> Result<AtomicMeasure<f64>> {
        let lv = self.updated(history)?;
        self.measure(&self.random_leaf_masses(&lv, rng)?)
    }

    /// Predictive chain: each new observation walks down the tree choosing
    /// children in proportion to updated parameters.
    pub fn continue_sequence(&self, history: &Sample<f64>, upto: usize, rng: &mut RngState) -> Result<Sample<f64>> {
        let mut lv = self.updated(history)?;
        let mut out = history.clone();
        for _ in history.len()..upto {
            let mut node = 0usize;
            for a in lv.iter_mut() {
                let (l, r) = (a[2 * node], a[2 * node + 1]);
                let child = if rng.random::<f64>() * (l + r) < l {
                    2 * node
                } else {
                    2 * node + 1
                };
                a[child] += 1.0;
                node = child;
            }
            out.push(Point::Scalar(self.leaf_point(node)));
        }
        Ok(out)
    }

    pub fn predictive_expectation(&self, history: &Sample<f64>, f: &TestFn) -> Result<Estimate> {
        let probs = self.leaf_probs(&self.updated(history)?);
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p * f.eval(&Point::Scalar(self.leaf_point(i)))?;
        }
        Ok(Estimate::exact(acc))
    }

    pub fn pair_expectation(&self, history: &Sample<f64>, g: &PairFn) -> Result<Estimate> {
        let lv = self.updated(history)?;
        let first = self.leaf_probs(&lv);
        let pts: Vec<f64> = (0..self.leaves()).map(|i| self.leaf_point(i)).collect();
        let mut acc = 0.0;
        let mut bumped = lv.clone();
        for (i, p1) in first.iter().enumerate() {
            if *p1 == 0.0 {
                continue;
            }
            for l in 1..=self.depth {
                bumped[l - 1][i >> (self.depth - l)] += 1.0;
            }
            let second = self.leaf_probs(&bumped);
            let mut inner = 0.0;
            for (j, p2) in second.iter().enumerate() {
                inner += p2 * g.eval(&Point::Scalar(pts[i]), &Point::Scalar(pts[j]))?;
            }
            acc += p1 * inner;
            for l in 1..=self.depth {
                bumped[l - 1][i >> (self.depth - l)] -= 1.0;
            }
        }
        Ok(Estimate::exact(acc))
    }
}
