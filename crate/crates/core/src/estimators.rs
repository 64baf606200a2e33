//! Finitary Bayes estimators of the mean, variance, distribution function
//! and Gini mean difference of the empirical measure `e_N`, together with
//! their classical (predictive) counterparts.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{empirical, AtomicMeasure, Sample};
use crate::priors::{Estimate, ExchangeableModel, PairFn, TestFn};
use crate::rng::{derive_seed, RngState};
use crate::scalar::compensated_sum;

pub const DEFAULT_MC_DRAWS: usize = 2000;

/// Model, history `xi(n)` and horizon `N`. Predictive quantities without a
/// closed form are estimated with `mc_draws` posterior draws seeded by
/// `mc_seed`.
#[derive(Debug, Clone)]
pub struct EstimatorInputs {
    pub model: ExchangeableModel,
    pub history: Sample<f64>,
    pub horizon: usize,
    pub mc_draws: usize,
    pub mc_seed: u64,
}

impl EstimatorInputs {
    pub fn new(model: ExchangeableModel, history: Sample<f64>, horizon: usize) -> Result<Self> {
        if horizon < history.len() {
            return Err(Error::BadHorizon(format!(
                "N = {horizon} is below the history length {}",
                history.len()
            )));
        }
        Ok(Self {
            model,
            history,
            horizon,
            mc_draws: DEFAULT_MC_DRAWS,
            mc_seed: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.history.len()
    }

    fn weights(&self) -> (f64, f64) {
        let (n, big_n) = (self.n() as f64, self.horizon as f64);
        (n / big_n, (big_n - n) / big_n)
    }

    fn require_pairs(&self) -> Result<()> {
        if self.horizon < 2 {
            return Err(Error::BadHorizon(format!(
                "N = {} but at least 2 is required",
                self.horizon
            )));
        }
        Ok(())
    }

    fn values(&self) -> Result<Vec<f64>> {
        self.history.values().iter().map(|p| TestFn::Identity.eval(p)).collect()
    }

    fn predictive(&self, f: &TestFn) -> Result<Estimate> {
        let mut rng = RngState::from_seed_u64(self.mc_seed);
        self.model
            .predictive_expectation_mc(&self.history, f, self.mc_draws, &mut rng)
    }

    fn pair(&self, g: &PairFn) -> Result<Estimate> {
        let mut rng = RngState::from_seed_u64(self.mc_seed ^ 0x9e37_79b9_7f4a_7c15);
        self.model
            .predictive_pair_expectation(&self.history, g, self.mc_draws, &mut rng)
    }
}

/// Finitary and classical estimates with the intermediate statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatePair {
    pub finitary: f64,
    pub classical: f64,
    /// Monte Carlo standard error of `finitary` (zero on exact paths).
    pub stderr: f64,
    pub components: BTreeMap<String, f64>,
}

fn quad(errs: &[(f64, f64)]) -> f64 {
    errs.iter().map(|(c, e)| (c * e).powi(2)).sum::<f64>().sqrt()
}

fn mean_of(xs: &[f64]) -> f64 {
    compensated_sum(xs.iter().copied()) / xs.len() as f64
}

/// `(n/N) mu_bar + ((N-n)/N) mu_hat`; classical `mu_hat`.
pub fn mean_estimators(inp: &EstimatorInputs) -> Result<EstimatePair> {
    let (wp, wf) = inp.weights();
    let xs = inp.values()?;
    let mu_hat = inp.predictive(&TestFn::Identity)?;
    let mut components = BTreeMap::from([("mu_hat".to_string(), mu_hat.value)]);
    let mut finitary = wf * mu_hat.value;
    if !xs.is_empty() {
        let mu_bar = mean_of(&xs);
        components.insert("mu_bar".to_string(), mu_bar);
        finitary = if wf == 0.0 { mu_bar } else { wp * mu_bar + finitary };
    }
    Ok(EstimatePair {
        finitary,
        classical: mu_hat.value,
        stderr: wf * mu_hat.stderr,
        components,
    })
}

/// Conditional expectation of the variance of `e_N`:
/// `(n/N) s2_bar + ((N-n)/N)(1 - 1/N) s2_hat - (n/N)^2 c_bar
///  - (N-n)(N-n-1)/N^2 c_hat - 2n(N-n)/N^2 mu_bar mu_hat`,
/// with `c_bar = mu_bar^2`; classical `s2_hat - c_hat`.
pub fn variance_estimators(inp: &EstimatorInputs) -> Result<EstimatePair> {
    inp.require_pairs()?;
    let n = inp.n() as f64;
    let big_n = inp.horizon as f64;
    let m = big_n - n;
    let xs = inp.values()?;
    let s2_hat = inp.predictive(&TestFn::Square)?;
    let c_hat = inp.pair(&PairFn::Product)?;
    let mut components = BTreeMap::from([
        ("s2_hat".to_string(), s2_hat.value),
        ("c12_hat".to_string(), c_hat.value),
    ]);
    let mut finitary = (m / big_n) * (1.0 - 1.0 / big_n) * s2_hat.value - m * (m - 1.0) / (big_n * big_n) * c_hat.value;
    let mut errs = vec![
        ((m / big_n) * (1.0 - 1.0 / big_n), s2_hat.stderr),
        (m * (m - 1.0) / (big_n * big_n), c_hat.stderr),
    ];
    if !xs.is_empty() {
        let mu_bar = mean_of(&xs);
        let s2_bar = compensated_sum(xs.iter().map(|x| x * x)) / n;
        let c_bar = mu_bar * mu_bar;
        components.insert("mu_bar".to_string(), mu_bar);
        components.insert("s2_bar".to_string(), s2_bar);
        components.insert("c12_bar".to_string(), c_bar);
        if m == 0.0 {
            finitary = s2_bar - c_bar;
        } else {
            let mu_hat = inp.predictive(&TestFn::Identity)?;
            components.insert("mu_hat".to_string(), mu_hat.value);
            let cross = 2.0 * n * m / (big_n * big_n);
            finitary += (n / big_n) * s2_bar - (n / big_n).powi(2) * c_bar - cross * mu_bar * mu_hat.value;
            errs.push((cross * mu_bar, mu_hat.stderr));
        }
    }
    Ok(EstimatePair {
        finitary,
        classical: s2_hat.value - c_hat.value,
        stderr: if m == 0.0 { 0.0 } else { quad(&errs) },
        components,
    })
}

/// `(n/N) E_n(y) + ((N-n)/N) P{xi_{n+1} <= y | xi(n)}`; classical the
/// predictive probability.
pub fn cdf_estimators(inp: &EstimatorInputs, y: f64) -> Result<EstimatePair> {
    let (wp, wf) = inp.weights();
    let xs = inp.values()?;
    let pred = inp.predictive(&TestFn::Indicator { y })?;
    let mut components = BTreeMap::from([("F_hat".to_string(), pred.value)]);
    let mut finitary = wf * pred.value;
    if !xs.is_empty() {
        let e_n = xs.iter().filter(|x| **x <= y).count() as f64 / xs.len() as f64;
        components.insert("E_n".to_string(), e_n);
        finitary = if wf == 0.0 { e_n } else { wp * e_n + finitary };
    }
    Ok(EstimatePair {
        finitary: finitary.clamp(0.0, 1.0),
        classical: pred.value,
        stderr: wf * pred.stderr,
        components,
    })
}

/// `(1/n^2) sum_{i,j} |x_i - x_j|` from sorted values.
fn gini_of(xs: &[f64]) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let terms = s.iter().enumerate().map(|(k, x)| (2.0 * k as f64 - n + 1.0) * x);
    2.0 * compensated_sum(terms) / (n * n)
}

/// `(n/N)^2 Delta_n + (N-n)(N-n-1)/N^2 G_hat + 2(N-n)/N^2 sum_{j<=n} E_j`
/// with `E_j = E[|xi_j - xi_{n+1}| | xi(n)]`; classical `G_hat`.
pub fn gini_estimators(inp: &EstimatorInputs) -> Result<EstimatePair> {
    inp.require_pairs()?;
    let n = inp.n() as f64;
    let big_n = inp.horizon as f64;
    let m = big_n - n;
    let xs = inp.values()?;
    let g_hat = inp.pair(&PairFn::AbsDiff)?;
    let mut components = BTreeMap::from([("G_hat".to_string(), g_hat.value)]);
    let w_pair = m * (m - 1.0) / (big_n * big_n);
    let mut finitary = w_pair * g_hat.value;
    let mut errs = vec![(w_pair, g_hat.stderr)];
    if !xs.is_empty() {
        let delta_n = gini_of(&xs);
        components.insert("Delta_n".to_string(), delta_n);
        if m == 0.0 {
            finitary = delta_n;
            errs.clear();
        } else {
            let cross = cross_sum(inp, &xs)?;
            components.insert("cross_sum".to_string(), cross.value);
            let w_cross = 2.0 * m / (big_n * big_n);
            finitary += (n / big_n).powi(2) * delta_n + w_cross * cross.value;
            errs.push((w_cross, cross.stderr));
        }
    }
    Ok(EstimatePair {
        finitary,
        classical: g_hat.value,
        stderr: quad(&errs),
        components,
    })
}

/// `sum_{j<=n} E[|xi_j - xi_{n+1}| | xi(n)]`.
fn cross_sum(inp: &EstimatorInputs, xs: &[f64]) -> Result<Estimate> {
    if inp.model.has_exact_predictive(&inp.history) {
        let mut distinct = xs.to_vec();
        distinct.sort_by(f64::total_cmp);
        let mut acc = Vec::new();
        for chunk in distinct.chunk_by(|a, b| a == b) {
            let e = inp.predictive(&TestFn::AbsDev { c: chunk[0] })?;
            acc.push(chunk.len() as f64 * e.value);
        }
        return Ok(Estimate::exact(compensated_sum(acc)));
    }
    let past = xs.to_vec();
    let f = TestFn::custom(move |x| past.iter().map(|y| (x - y).abs()).sum());
    inp.predictive(&f)
}

/// Mean and standard error of `t(e_N)` over `replicas` continuations of the
/// history. Replica `r` uses its own stream derived from one draw of `rng`,
/// so the result does not depend on the thread count.
pub fn finitary_functional<F>(inp: &EstimatorInputs, t: F, replicas: usize, rng: &mut RngState) -> Result<Estimate>
where
    F: Fn(&AtomicMeasure<f64>) -> Result<f64> + Sync,
{
    replicated(inp, replicas, rng, |e| t(e))
}

/// Monte Carlo `E[(t(e_N) - action)^2 | xi(n)]`.
pub fn posterior_risk<F>(
    inp: &EstimatorInputs,
    t: F,
    action: f64,
    replicas: usize,
    rng: &mut RngState,
) -> Result<Estimate>
where
    F: Fn(&AtomicMeasure<f64>) -> Result<f64> + Sync,
{
    replicated(inp, replicas, rng, |e| Ok((t(e)? - action).powi(2)))
}

fn replicated<F>(inp: &EstimatorInputs, replicas: usize, rng: &mut RngState, stat: F) -> Result<Estimate>
where
    F: Fn(&AtomicMeasure<f64>) -> Result<f64> + Sync,
{
    if replicas < 2 {
        return Err(Error::BadParameter("at least 2 replicas are required".to_string()));
    }
    if inp.horizon == 0 {
        return Err(Error::EmptySample);
    }
    let master: u64 = rand::Rng::random(rng);
    let vals = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut local = derive_seed(master, r as u32, 0);
            let full = inp.model.continue_sequence(&inp.history, inp.horizon, &mut local)?;
            stat(&empirical(&full)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = vals.len() as f64;
    let mean = compensated_sum(vals.iter().copied()) / n;
    let var = compensated_sum(vals.iter().map(|v| (v - mean).powi(2))) / (n - 1.0);
    Ok(Estimate {
        value: mean,
        stderr: (var / n).sqrt(),
    })
}

/// `int x de` for real or label-valued measures.
pub fn mean_functional(e: &AtomicMeasure<f64>) -> Result<f64> {
    let mut acc = 0.0;
    for (p, w) in e.atoms() {
        acc += w * TestFn::Identity.eval(&p)?;
    }
    Ok(acc)
}

/// `int x^2 de - (int x de)^2`.
pub fn variance_functional(e: &AtomicMeasure<f64>) -> Result<f64> {
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for (p, w) in e.atoms() {
        let x = TestFn::Identity.eval(&p)?;
        s1 += w * x;
        s2 += w * x * x;
    }
    Ok(s2 - s1 * s1)
}

/// `e(-inf, y]`.
pub fn cdf_functional(e: &AtomicMeasure<f64>, y: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (p, w) in e.atoms() {
        if TestFn::Identity.eval(&p)? <= y {
            acc += w;
        }
    }
    Ok(acc)
}

/// Gini mean difference `sum_{i,j} w_i w_j |x_i - x_j|` of a real or
/// label-valued measure.
pub fn gini_functional(e: &AtomicMeasure<f64>) -> Result<f64> {
    let mut atoms: Vec<(f64, f64)> = e
        .atoms()
        .map(|(p, w)| Ok((TestFn::Identity.eval(&p)?, w)))
        .collect::<Result<_>>()?;
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let mut below = 0.0;
    let mut terms = Vec::with_capacity(atoms.len());
    for (x, w) in &atoms {
        let above = total - below - w;
        terms.push(w * x * (below - above));
        below += w;
    }
    Ok(2.0 * compensated_sum(terms))
}
