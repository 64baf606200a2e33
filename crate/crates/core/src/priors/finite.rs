use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::functions::{PairFn, TestFn};
use super::Estimate;
use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, Point, Sample, SpaceTag};
use crate::rng::RngState;

/// Dirichlet prior on the simplex over `k` symbols. With `atoms` the symbols
/// are embedded in the real line and observations are emitted as scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDirichletModel {
    pub alpha: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<f64>>,
}

impl FiniteDirichletModel {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        let m = Self { alpha, atoms: None };
        m.validate()?;
        Ok(m)
    }

    pub fn on_points(alpha: Vec<f64>, atoms: Vec<f64>) -> Result<Self> {
        let m = Self {
            alpha,
            atoms: Some(atoms),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.len() < 2 {
            return Err(Error::BadModel("a finite Dirichlet model needs k >= 2".to_string()));
        }
        if let Some(a) = self.alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::BadModel(format!("concentration {a} is not positive")));
        }
        if let Some(atoms) = &self.atoms {
            if atoms.len() != self.alpha.len() {
                return Err(Error::BadModel(
                    "one atom per concentration parameter is required".to_string(),
                ));
            }
            let mut s = atoms.clone();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            if s.iter().any(|x| !x.is_finite()) || s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::BadModel("atoms must be finite and distinct".to_string()));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.alpha.len()
    }

    pub fn space(&self) -> SpaceTag {
        match self.atoms {
            Some(_) => SpaceTag::RealLine,
            None => SpaceTag::FiniteAlphabet { k: self.k() },
        }
    }

    fn total(&self) -> f64 {
        self.alpha.iter().sum()
    }

    fn point(&self, j: usize) -> Point<f64> {
        match &self.atoms {
            Some(a) => Point::Scalar(a[j]),
            None => Point::Label(j),
        }
    }

    /// Real value of symbol `j` (its index when not embedded).
    pub fn value(&self, j: usize) -> f64 {
        self.atoms.as_ref().map_or(j as f64, |a| a[j])
    }

    fn label_of(&self, p: &Point<f64>) -> Result<usize> {
        let found = match (p, &self.atoms) {
            (Point::Label(l), None) if *l < self.k() => Some(*l),
            (Point::Scalar(x), Some(a)) => a.iter().position(|y| y == x),
            _ => None,
        };
        found.ok_or_else(|| Error::SpaceMismatch(format!("observation {p} is not a symbol of the model")))
    }

    pub fn counts(&self, history: &Sample<f64>) -> Result<Vec<usize>> {
        let mut c = vec![0usize; self.k()];
        for p in history.values() {
            c[self.label_of(p)?] += 1;
        }
        Ok(c)
    }

    /// One Polya-urn step: symbol `j` with probability
    /// `(alpha_j + c_j) / (alpha + n)`.
    fn urn_step(&self, counts: &[usize], n: usize, rng: &mut RngState) -> usize {
        let total = self.total() + n as f64;
        let mut u = rng.random::<f64>() * total;
        for (j, (a, c)) in self.alpha.iter().zip(counts).enumerate() {
            u -= a + *c as f64;
            if u < 0.0 {
                return j;
            }
        }
        self.k() - 1
    }

    pub fn continue_sequence(&self, history: &Sample<f64>, upto: usize, rng: &mut RngState) -> Result<Sample<f64>> {
        let mut counts = self.counts(history)?;
        let mut out = history.clone();
        for n in history.len()..upto {
            let j = self.urn_step(&counts, n, rng);
            counts[j] += 1;
            out.push(self.point(j));
        }
        Ok(out)
    }

    pub fn posterior_weights(&self, history: &Sample<f64>, rng: &mut RngState) -> Result<Vec<f64>> {
        let counts = self.counts(history)?;
        loop {
            let mut g = Vec::with_capacity(self.k());
            for (a, c) in self.alpha.iter().zip(&counts) {
                let gamma = Gamma::new(a + *c as f64, 1.0).map_err(|e| Error::BadModel(e.to_string()))?;
                g.push(gamma.sample(rng));
            }
            let s: f64 = g.iter().sum();
            // all draws can underflow for tiny shapes; redraw
            if s > 0.0 && s.is_finite() {
                return Ok(g.into_iter().map(|x| x / s).collect());
            }
        }
    }

    pub fn posterior_draw(&self, history: &Sample<f64>, rng: &mut RngState) -> Result<AtomicMeasure<f64>> {
        let w = self.posterior_weights(history, rng)?;
        AtomicMeasure::normalized(self.space(), (0..self.k()).map(|j| (self.point(j), w[j])).collect())
    }

    /// Predictive probabilities `(alpha_j + c_j) / (alpha + n)`.
    pub fn predictive(&self, history: &Sample<f64>) -> Result<Vec<f64>> {
        let counts = self.counts(history)?;
        let total = self.total() + history.len() as f64;
        Ok(self
            .alpha
            .iter()
            .zip(&counts)
            .map(|(a, c)| (a + *c as f64) / total)
            .collect())
    }

    pub fn predictive_expectation(&self, history: &Sample<f64>, f: &TestFn) -> Result<Estimate> {
        let probs = self.predictive(history)?;
        let mut acc = 0.0;
        for (j, p) in probs.iter().enumerate() {
            acc += p * f.eval(&self.point(j))?;
        }
        Ok(Estimate::exact(acc))
    }

    /// `E[g(xi_{n+1}, xi_{n+2}) | xi(n)]` by one urn step.
    pub fn pair_expectation(&self, history: &Sample<f64>, g: &PairFn) -> Result<Estimate> {
        let counts = self.counts(history)?;
        let n = history.len() as f64;
        let total = self.total() + n;
        let mut acc = 0.0;
        for j in 0..self.k() {
            let p1 = (self.alpha[j] + counts[j] as f64) / total;
            let mut inner = 0.0;
            for l in 0..self.k() {
                let w = self.alpha[l] + counts[l] as f64 + f64::from(l == j);
                inner += w * g.eval(&self.point(j), &self.point(l))?;
            }
            acc += p1 * inner / (total + 1.0);
        }
        Ok(Estimate::exact(acc))
    }
}
