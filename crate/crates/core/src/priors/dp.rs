use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use super::functions::{PairFn, TestFn};
use super::sticks::{break_sticks, Truncation};
use super::Estimate;
use crate::error::{Error, Result};
use crate::measure::{AnalyticFamily, AtomicMeasure, Sample};
use crate::rng::RngState;

pub(crate) fn default_max_sticks() -> usize {
    4096
}

pub(crate) fn default_residual_tol() -> f64 {
    1e-8
}

/// Dirichlet process with total mass `c` and base distribution `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletProcessModel {
    pub mass: f64,
    pub base: AnalyticFamily,
    #[serde(default = "default_max_sticks")]
    pub max_sticks: usize,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
}

pub(crate) fn validate_truncation(max_sticks: usize, residual_tol: f64) -> Result<()> {
    if max_sticks < 8 {
        return Err(Error::BadModel(format!(
            "max_sticks must be at least 8, got {max_sticks}"
        )));
    }
    if !(residual_tol > 0.0 && residual_tol <= 1e-3) {
        return Err(Error::BadModel(format!(
            "residual_tol must lie in (0, 1e-3], got {residual_tol}"
        )));
    }
    Ok(())
}

impl DirichletProcessModel {
    pub fn new(mass: f64, base: AnalyticFamily) -> Result<Self> {
        let m = Self {
            mass,
            base,
            max_sticks: default_max_sticks(),
            residual_tol: default_residual_tol(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::BadModel(format!(
                "total mass must be positive, got {}",
                self.mass
            )));
        }
        self.base.validate()?;
        validate_truncation(self.max_sticks, self.residual_tol)
    }

    /// Blackwell-MacQueen continuation: a fresh base draw with probability
    /// `c / (c + i)`, otherwise a uniformly chosen earlier value.
    pub fn continue_sequence(&self, history: &Sample<f64>, upto: usize, rng: &mut RngState) -> Result<Sample<f64>> {
        let mut xs = history.scalars()?;
        xs.reserve(upto.saturating_sub(xs.len()));
        for i in xs.len()..upto {
            let u = rng.random::<f64>() * (self.mass + i as f64);
            let x = if u < self.mass {
                self.base.sample(rng)
            } else {
                xs[rng.random_range(0..i)]
            };
            xs.push(x);
        }
        Ok(Sample::from_scalars(&xs))
    }

    /// Truncated stick-breaking draw from the posterior process with mass
    /// `c + n` and base `(c base + sum_i delta_{xi_i}) / (c + n)`.
    pub fn posterior_draw_truncated(
        &self,
        history: &Sample<f64>,
        rng: &mut RngState,
    ) -> Result<(AtomicMeasure<f64>, Truncation)> {
        let xs = history.scalars()?;
        let n = xs.len();
        let post_mass = self.mass + n as f64;
        let stick = Beta::new(1.0, post_mass).map_err(|e| Error::BadModel(e.to_string()))?;
        let base = self.base;
        let c = self.mass;
        let (atoms, info) = break_sticks(
            |_, r| Some(stick.sample(r)),
            |r| {
                if n == 0 || r.random::<f64>() * post_mass < c {
                    base.sample(r)
                } else {
                    xs[r.random_range(0..n)]
                }
            },
            self.max_sticks,
            self.residual_tol,
            rng,
        );
        let (pts, ws): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
        let measure = AtomicMeasure::normalized(
            crate::measure::SpaceTag::RealLine,
            pts.into_iter()
                .zip(ws)
                .map(|(x, w)| (crate::measure::Point::Scalar(x), w))
                .collect(),
        )?;
        Ok((measure, info))
    }

    pub fn predictive_expectation(&self, history: &Sample<f64>, f: &TestFn) -> Result<Estimate> {
        let xs = history.scalars()?;
        let n = xs.len() as f64;
        let mut acc = self.mass * f.base_expectation(&self.base)?;
        for &x in &xs {
            let v = f.at(x);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand(x.to_string()));
            }
            acc += v;
        }
        Ok(Estimate::exact(acc / (self.mass + n)))
    }

    /// Exact one-step expansion: condition on whether `xi_{n+1}` repeats an
    /// observed value or is fresh from the base, then apply the predictive
    /// rule once more.
    pub fn pair_expectation(&self, history: &Sample<f64>, g: &PairFn) -> Result<Estimate> {
        let xs = history.scalars()?;
        let n = xs.len() as f64;
        let c = self.mass;
        let mut repeat = 0.0;
        for &x in &xs {
            let mut s = c * g.base_section(x, &self.base)? + g.at(x, x);
            for &y in &xs {
                s += g.at(x, y);
            }
            repeat += s;
        }
        let mut fresh = c * g.base_independent(&self.base)? + g.base_diagonal(&self.base)?;
        for &y in &xs {
            fresh += g.base_section_left(y, &self.base)?;
        }
        let v = (repeat + c * fresh) / ((c + n) * (c + n + 1.0));
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand("pair expectation".to_string()));
        }
        Ok(Estimate::exact(v))
    }
}
