use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use super::dp::{default_max_sticks, default_residual_tol, validate_truncation};
use super::sticks::{break_sticks, Truncation};
use crate::error::{Error, Result};
use crate::measure::{AnalyticFamily, AtomicMeasure, Point, Sample, SpaceTag};
use crate::rng::RngState;

/// Largest history for which the rejection posterior is offered.
pub const STICK_POSTERIOR_MAX_N: usize = 4;
const REJECTION_ATTEMPTS: usize = 1_000_000;

/// Law of the stick fractions `V_k ~ Beta(a_k, b_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum BetaRule {
    /// Explicit `(a_k, b_k)`; the stick after the last pair takes the rest.
    Fixed { pairs: Vec<(f64, f64)> },
    /// Same `(a, b)` for every stick.
    Constant { a: f64, b: f64 },
    /// `a_k = 1 - discount`, `b_k = strength + k * discount` (`k >= 1`).
    PitmanYor { discount: f64, strength: f64 },
}

impl BetaRule {
    fn params(&self, k: usize) -> Option<(f64, f64)> {
        match self {
            BetaRule::Fixed { pairs } => pairs.get(k).copied(),
            BetaRule::Constant { a, b } => Some((*a, *b)),
            BetaRule::PitmanYor { discount, strength } => Some((1.0 - discount, strength + (k + 1) as f64 * discount)),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |a: f64, b: f64| a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite();
        let good = match self {
            BetaRule::Fixed { pairs } => !pairs.is_empty() && pairs.iter().all(|&(a, b)| ok(a, b)),
            BetaRule::Constant { a, b } => ok(*a, *b),
            BetaRule::PitmanYor { discount, strength } => {
                (0.0..1.0).contains(discount) && *strength > -discount && ok(1.0 - discount, strength + discount)
            }
        };
        if good {
            Ok(())
        } else {
            Err(Error::BadModel(format!("invalid stick fractions {self:?}")))
        }
    }
}

/// `p = sum_k p_k delta_{Z_k}` with `p_k = V_k prod_{j<k} (1 - V_j)` and
/// i.i.d. locations `Z_k ~ base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickBreakingModel {
    pub beta: BetaRule,
    pub base: AnalyticFamily,
    #[serde(default = "default_max_sticks")]
    pub max_sticks: usize,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
}

impl StickBreakingModel {
    pub fn new(beta: BetaRule, base: AnalyticFamily) -> Result<Self> {
        let m = Self {
            beta,
            base,
            max_sticks: default_max_sticks(),
            residual_tol: default_residual_tol(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.beta.validate()?;
        self.base.validate()?;
        validate_truncation(self.max_sticks, self.residual_tol)
    }

    /// Stick weights only, in stick order.
    fn weights(&self, rng: &mut RngState) -> (Vec<f64>, Truncation) {
        let rule = &self.beta;
        // parameters were validated, so every Beta law exists
        let (atoms, info) = break_sticks(
            |k, r| {
                let (a, b) = rule.params(k)?;
                Some(Beta::new(a, b).map_or(1.0, |d| d.sample(r)))
            },
            |_| 0.0,
            self.max_sticks,
            self.residual_tol,
            rng,
        );
        (atoms.into_iter().map(|(_, w)| w).collect(), info)
    }

    fn measure(points: &[f64], weights: &[f64]) -> Result<AtomicMeasure<f64>> {
        AtomicMeasure::normalized(
            SpaceTag::RealLine,
            points
                .iter()
                .zip(weights)
                .map(|(&x, &w)| (Point::Scalar(x), w))
                .collect(),
        )
    }

    pub fn prior_draw(&self, rng: &mut RngState) -> Result<(AtomicMeasure<f64>, Truncation)> {
        let (w, info) = self.weights(rng);
        let z: Vec<f64> = (0..w.len()).map(|_| self.base.sample(rng)).collect();
        Ok((Self::measure(&z, &w)?, info))
    }

    /// Exact posterior draw by rejection for histories of at most
    /// [`STICK_POSTERIOR_MAX_N`] observations: weights and stick labels for
    /// the observations are drawn from the prior and accepted when the labels
    /// reproduce the tie pattern of the history; the matched sticks then
    /// carry the observed values.
    pub fn posterior_draw(&self, history: &Sample<f64>, rng: &mut RngState) -> Result<AtomicMeasure<f64>> {
        let xs = history.scalars()?;
        if xs.is_empty() {
            return Ok(self.prior_draw(rng)?.0);
        }
        if xs.len() > STICK_POSTERIOR_MAX_N {
            return Err(Error::PosteriorUnavailable(format!(
                "stick-breaking posterior is only offered for n <= {STICK_POSTERIOR_MAX_N}, got n = {}",
                xs.len()
            )));
        }
        let n = xs.len();
        for _ in 0..REJECTION_ATTEMPTS {
            let (w, _) = self.weights(rng);
            let mut cum = Vec::with_capacity(w.len());
            let mut acc = 0.0;
            for x in &w {
                acc += x;
                cum.push(acc);
            }
            let labels: Vec<usize> = (0..n)
                .map(|_| {
                    let u = rng.random::<f64>() * acc;
                    cum.partition_point(|&c| c <= u).min(w.len() - 1)
                })
                .collect();
            let consistent = (0..n).all(|i| (0..n).all(|j| (labels[i] == labels[j]) == (xs[i] == xs[j])));
            if !consistent {
                continue;
            }
            let mut z: Vec<f64> = (0..w.len()).map(|_| self.base.sample(rng)).collect();
            for (i, &l) in labels.iter().enumerate() {
                z[l] = xs[i];
            }
            return Self::measure(&z, &w);
        }
        Err(Error::PosteriorUnavailable(
            "rejection sampler exhausted its attempts".to_string(),
        ))
    }
}
