//! Laws of exchangeable sequences: predictive sampling, continuation of a
//! history, posterior draws of the directing measure and predictive
//! expectations.

mod dp;
mod finite;
mod functions;
mod polya;
mod stick;
mod sticks;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use dp::DirichletProcessModel;
pub use finite::FiniteDirichletModel;
pub use functions::{PairFn, TestFn};
pub use polya::{PolyaParams, PolyaTreeModel, POLYA_MAX_DEPTH};
pub use stick::{BetaRule, StickBreakingModel, STICK_POSTERIOR_MAX_N};
pub use sticks::Truncation;

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, Point, Sample, SpaceTag};
use crate::rng::RngState;

/// A value with its Monte Carlo standard error (zero on exact paths).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0 }
    }

    pub fn is_exact(&self) -> bool {
        self.stderr == 0.0
    }

    fn from_draws(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let stderr = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            f64::INFINITY
        };
        Self { value: mean, stderr }
    }
}

/// Tagged union of the supported models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExchangeableModel {
    FiniteDirichlet(FiniteDirichletModel),
    DirichletProcess(DirichletProcessModel),
    StickBreaking(StickBreakingModel),
    PolyaTree(PolyaTreeModel),
}

/// `n` i.i.d. draws from an atomic measure.
pub fn draw_iid(p: &AtomicMeasure<f64>, n: usize, rng: &mut RngState) -> Sample<f64> {
    let mut cum = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for w in p.weights() {
        acc += w;
        cum.push(acc);
    }
    let mut out = Sample::empty();
    for _ in 0..n {
        let u = rng.random::<f64>() * acc;
        let i = cum.partition_point(|&c| c <= u).min(p.len() - 1);
        out.push(p.point(i));
    }
    out
}

fn check_history(space: SpaceTag, history: &Sample<f64>) -> Result<()> {
    match history.values().iter().find(|p| !p.fits(space)) {
        Some(p) => Err(Error::SpaceMismatch(format!("{p:?} is not a point of {space:?}"))),
        None => Ok(()),
    }
}

impl ExchangeableModel {
    pub fn from_json(s: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::FiniteDirichlet(m) => m.validate(),
            Self::DirichletProcess(m) => m.validate(),
            Self::StickBreaking(m) => m.validate(),
            Self::PolyaTree(m) => m.validate(),
        }
    }

    pub fn space(&self) -> SpaceTag {
        match self {
            Self::FiniteDirichlet(m) => m.space(),
            _ => SpaceTag::RealLine,
        }
    }

    /// `xi(n)` from the exchangeable law of the model.
    pub fn sample_sequence(&self, n: usize, rng: &mut RngState) -> Result<Sample<f64>> {
        match self {
            Self::StickBreaking(m) => Ok(draw_iid(&m.prior_draw(rng)?.0, n, rng)),
            Self::PolyaTree(m) => Ok(draw_iid(&m.prior_draw(rng)?, n, rng)),
            _ => self.continue_sequence(&Sample::empty(), n, rng),
        }
    }

    /// Extends `history` to length `upto` under the conditional law of the
    /// future given the past.
    pub fn continue_sequence(&self, history: &Sample<f64>, upto: usize, rng: &mut RngState) -> Result<Sample<f64>> {
        if upto < history.len() {
            return Err(Error::BadHorizon(format!(
                "N = {upto} is below the history length {}",
                history.len()
            )));
        }
        check_history(self.space(), history)?;
        match self {
            Self::FiniteDirichlet(m) => m.continue_sequence(history, upto, rng),
            Self::DirichletProcess(m) => m.continue_sequence(history, upto, rng),
            Self::StickBreaking(m) => {
                if upto == history.len() {
                    return Ok(history.clone());
                }
                let p = m.posterior_draw(history, rng)?;
                let mut out = history.clone();
                for x in draw_iid(&p, upto - history.len(), rng).into_values() {
                    out.push(x);
                }
                Ok(out)
            }
            Self::PolyaTree(m) => m.continue_sequence(history, upto, rng),
        }
    }

    /// One draw of the directing measure given `history`.
    pub fn posterior_draw(&self, history: &Sample<f64>, rng: &mut RngState) -> Result<AtomicMeasure<f64>> {
        check_history(self.space(), history)?;
        match self {
            Self::FiniteDirichlet(m) => m.posterior_draw(history, rng),
            Self::DirichletProcess(m) => Ok(m.posterior_draw_truncated(history, rng)?.0),
            Self::StickBreaking(m) => m.posterior_draw(history, rng),
            Self::PolyaTree(m) => m.posterior_draw(history, rng),
        }
    }

    /// Whether predictive expectations given `history` have a closed form.
    pub fn has_exact_predictive(&self, history: &Sample<f64>) -> bool {
        !matches!(self, Self::StickBreaking(_)) || history.is_empty()
    }

    /// `E[f(xi_{n+1}) | xi(n)]` on the exact paths.
    pub fn predictive_expectation(&self, history: &Sample<f64>, f: &TestFn) -> Result<Estimate> {
        check_history(self.space(), history)?;
        match self {
            Self::FiniteDirichlet(m) => m.predictive_expectation(history, f),
            Self::DirichletProcess(m) => m.predictive_expectation(history, f),
            Self::PolyaTree(m) => m.predictive_expectation(history, f),
            Self::StickBreaking(m) if history.is_empty() => Ok(Estimate::exact(f.base_expectation(&m.base)?)),
            Self::StickBreaking(_) => Err(Error::PosteriorUnavailable(
                "no closed-form stick-breaking predictive; use the Monte Carlo variant".to_string(),
            )),
        }
    }

    /// Exact when available, otherwise the mean of `int f dp` over
    /// `mc_draws` posterior draws.
    pub fn predictive_expectation_mc(
        &self,
        history: &Sample<f64>,
        f: &TestFn,
        mc_draws: usize,
        rng: &mut RngState,
    ) -> Result<Estimate> {
        if self.has_exact_predictive(history) {
            return self.predictive_expectation(history, f);
        }
        self.monte_carlo(history, mc_draws, rng, |p| {
            let mut acc = 0.0;
            for (x, w) in p.atoms() {
                acc += w * f.eval(&x)?;
            }
            Ok(acc)
        })
    }

    /// `E[g(xi_{n+1}, xi_{n+2}) | xi(n)]`.
    pub fn predictive_pair_expectation(
        &self,
        history: &Sample<f64>,
        g: &PairFn,
        mc_draws: usize,
        rng: &mut RngState,
    ) -> Result<Estimate> {
        check_history(self.space(), history)?;
        if let PairFn::Constant { value } = g {
            return Ok(Estimate::exact(*value));
        }
        match self {
            Self::FiniteDirichlet(m) => m.pair_expectation(history, g),
            Self::DirichletProcess(m) => m.pair_expectation(history, g),
            Self::PolyaTree(m) => m.pair_expectation(history, g),
            Self::StickBreaking(_) => self.monte_carlo(history, mc_draws, rng, |p| {
                let atoms: Vec<(Point<f64>, f64)> = p.atoms().collect();
                let mut acc = 0.0;
                for (x, wx) in &atoms {
                    for (y, wy) in &atoms {
                        acc += wx * wy * g.eval(x, y)?;
                    }
                }
                Ok(acc)
            }),
        }
    }

    fn monte_carlo<F>(
        &self,
        history: &Sample<f64>,
        mc_draws: usize,
        rng: &mut RngState,
        mut stat: F,
    ) -> Result<Estimate>
    where
        F: FnMut(&AtomicMeasure<f64>) -> Result<f64>,
    {
        if mc_draws == 0 {
            return Err(Error::BadParameter("mc_draws must be at least 1".to_string()));
        }
        let mut vals = Vec::with_capacity(mc_draws);
        for _ in 0..mc_draws {
            let p = self.posterior_draw(history, rng)?;
            vals.push(stat(&p)?);
        }
        Ok(Estimate::from_draws(&vals))
    }
}

pub fn sample_sequence(model: &ExchangeableModel, n: usize, rng: &mut RngState) -> Result<Sample<f64>> {
    model.sample_sequence(n, rng)
}

pub fn continue_sequence(
    model: &ExchangeableModel,
    history: &Sample<f64>,
    upto: usize,
    rng: &mut RngState,
) -> Result<Sample<f64>> {
    model.continue_sequence(history, upto, rng)
}

pub fn posterior_draw(
    model: &ExchangeableModel,
    history: &Sample<f64>,
    rng: &mut RngState,
) -> Result<AtomicMeasure<f64>> {
    model.posterior_draw(history, rng)
}

pub fn predictive_expectation(model: &ExchangeableModel, history: &Sample<f64>, f: &TestFn) -> Result<Estimate> {
    model.predictive_expectation(history, f)
}

pub fn predictive_pair_expectation(
    model: &ExchangeableModel,
    history: &Sample<f64>,
    g: &PairFn,
    mc_draws: usize,
    rng: &mut RngState,
) -> Result<Estimate> {
    model.predictive_pair_expectation(history, g, mc_draws, rng)
}

pub fn polya_tree_marginal(model: &PolyaTreeModel, eps: &str) -> Result<f64> {
    model.marginal(eps)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::measure::AnalyticFamily;

    fn fd11() -> ExchangeableModel {
        ExchangeableModel::FiniteDirichlet(FiniteDirichletModel::new(vec![1.0, 1.0]).unwrap())
    }

    fn dp(c: f64) -> ExchangeableModel {
        ExchangeableModel::DirichletProcess(DirichletProcessModel::new(c, AnalyticFamily::standard_normal()).unwrap())
    }

    fn within(hits: usize, trials: usize, p: f64, sigmas: f64) -> bool {
        let n = trials as f64;
        let se = (p * (1.0 - p) / n).sqrt();
        (hits as f64 / n - p).abs() <= sigmas * se
    }

    fn explicit(pairs: &[(&str, f64)], depth: usize) -> PolyaTreeModel {
        let alpha: BTreeMap<String, f64> = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        PolyaTreeModel::new(
            AnalyticFamily::standard_normal(),
            depth,
            PolyaParams::Explicit { alpha },
        )
        .unwrap()
    }

    fn lavine(depth: usize) -> PolyaTreeModel {
        PolyaTreeModel::new(
            AnalyticFamily::Uniform { a: 0.0, b: 1.0 },
            depth,
            PolyaParams::LevelPower { c: 1.0, exponent: 2.0 },
        )
        .unwrap()
    }

    #[test]
    fn empty_sequences() {
        let mut rng = RngState::from_seed_u64(1);
        let sb = StickBreakingModel::new(BetaRule::Constant { a: 1.0, b: 1.0 }, AnalyticFamily::standard_normal());
        let models = [
            fd11(),
            dp(1.0),
            ExchangeableModel::StickBreaking(sb.unwrap()),
            ExchangeableModel::PolyaTree(lavine(4)),
        ];
        for m in &models {
            assert!(m.sample_sequence(0, &mut rng).unwrap().is_empty());
        }
    }

    #[test]
    fn finite_urn_match_probability() {
        let mut rng = RngState::from_seed_u64(2);
        let m = fd11();
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| {
                let s = m.sample_sequence(2, &mut rng).unwrap();
                s.values()[0] == s.values()[1]
            })
            .count();
        assert!(within(hits, trials, 2.0 / 3.0, 4.0));
    }

    #[test]
    fn dp_repeat_probability() {
        let mut rng = RngState::from_seed_u64(3);
        let m = dp(1.0);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| {
                let s = m.sample_sequence(2, &mut rng).unwrap();
                s.values()[0] == s.values()[1]
            })
            .count();
        assert!(within(hits, trials, 0.5, 4.0));
    }

    #[test]
    fn continuation_examples() {
        let mut rng = RngState::from_seed_u64(4);
        let h = Sample::from_labels(&[0]);
        let m = fd11();
        assert_eq!(m.continue_sequence(&h, 1, &mut rng).unwrap(), h);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| m.continue_sequence(&h, 2, &mut rng).unwrap().values()[1] == Point::Label(0))
            .count();
        assert!(within(hits, trials, 2.0 / 3.0, 4.0));

        let h = Sample::from_scalars(&[0.3, -1.2]);
        let m = dp(2.0);
        let fresh = (0..trials)
            .filter(|_| {
                let x = m.continue_sequence(&h, 3, &mut rng).unwrap().values()[2].clone();
                h.count(&x) == 0
            })
            .count();
        assert!(within(fresh, trials, 0.5, 4.0));

        let err = m.continue_sequence(&h, 1, &mut rng).unwrap_err();
        assert_eq!(err.code(), "bad-horizon");
    }

    #[test]
    fn finite_posterior_draws() {
        let mut rng = RngState::from_seed_u64(5);
        let m = fd11();
        let draws = 20_000;
        let below = (0..draws)
            .filter(|_| {
                m.posterior_draw(&Sample::empty(), &mut rng)
                    .unwrap()
                    .mass_at(&Point::Label(0))
                    < 0.25
            })
            .count();
        assert!(within(below, draws, 0.25, 4.0));

        let h = Sample::from_labels(&[0, 0]);
        let draws = 100_000;
        let w: Vec<f64> = (0..draws)
            .map(|_| m.posterior_draw(&h, &mut rng).unwrap().mass_at(&Point::Label(0)))
            .collect();
        let est = Estimate::from_draws(&w);
        assert!((est.value - 0.75).abs() < 3.0 * est.stderr + 1e-12);
    }

    #[test]
    fn dp_draws_are_normalized_with_small_residual() {
        let mut rng = RngState::from_seed_u64(6);
        let ExchangeableModel::DirichletProcess(m) = dp(3.0) else {
            unreachable!()
        };
        for n in [0usize, 5] {
            let h = Sample::from_scalars(&(0..n).map(|i| i as f64).collect::<Vec<_>>());
            for _ in 0..200 {
                let (p, info) = m.posterior_draw_truncated(&h, &mut rng).unwrap();
                assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(info.hit_max_sticks || info.residual < m.residual_tol);
            }
        }
    }

    #[test]
    fn predictive_expectation_examples() {
        let m = dp(1.0);
        assert_eq!(
            m.predictive_expectation(&Sample::empty(), &TestFn::Identity)
                .unwrap()
                .value,
            0.0
        );
        let v = m
            .predictive_expectation(&Sample::from_scalars(&[2.0]), &TestFn::Identity)
            .unwrap();
        assert!((v.value - 1.0).abs() < 1e-15 && v.is_exact());
        let v = fd11()
            .predictive_expectation(&Sample::from_labels(&[0, 0]), &TestFn::LabelIndicator { label: 0 })
            .unwrap();
        assert!((v.value - 0.75).abs() < 1e-15);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let m = dp(1.0);
        let f = TestFn::custom(|x| 1.0 / x);
        let err = m.predictive_expectation(&Sample::from_scalars(&[0.0]), &f).unwrap_err();
        assert_eq!(err.code(), "non-finite-integrand");
    }

    #[test]
    fn pair_expectation_examples() {
        let mut rng = RngState::from_seed_u64(7);
        let one = PairFn::Constant { value: 1.0 };
        for m in [fd11(), dp(1.0)] {
            let h = if matches!(m, ExchangeableModel::FiniteDirichlet(_)) {
                Sample::from_labels(&[1])
            } else {
                Sample::from_scalars(&[0.5])
            };
            assert_eq!(
                m.predictive_pair_expectation(&h, &one, 1, &mut rng).unwrap(),
                Estimate::exact(1.0)
            );
        }
        let v = fd11()
            .predictive_pair_expectation(&Sample::empty(), &PairFn::BothLabel { label: 0 }, 1, &mut rng)
            .unwrap();
        assert!((v.value - 1.0 / 3.0).abs() < 1e-15);
        let v = dp(1.0)
            .predictive_pair_expectation(&Sample::empty(), &PairFn::Product, 1, &mut rng)
            .unwrap();
        assert!((v.value - 0.5).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn dp_pair_expectation_matches_simulation() {
        let mut rng = RngState::from_seed_u64(8);
        let m = dp(1.5);
        let h = Sample::from_scalars(&[0.4, -0.7, 0.4]);
        let exact = m
            .predictive_pair_expectation(&h, &PairFn::AbsDiff, 1, &mut rng)
            .unwrap()
            .value;
        let draws: Vec<f64> = (0..100_000)
            .map(|_| {
                let s = m.continue_sequence(&h, 5, &mut rng).unwrap().scalars().unwrap();
                (s[3] - s[4]).abs()
            })
            .collect();
        let est = Estimate::from_draws(&draws);
        assert!((est.value - exact).abs() < 4.0 * est.stderr, "{exact} vs {est:?}");
    }

    #[test]
    fn polya_marginal_examples() {
        let t = explicit(&[("0", 2.0), ("1", 1.0)], 1);
        assert!((t.marginal("0").unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let t = explicit(&[("0", 1.0), ("1", 1.0), ("00", 3.0), ("01", 1.0)], 2);
        assert!((polya_tree_marginal(&t, "01").unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(t.marginal("10").unwrap_err().code(), "param-missing");
        assert_eq!(t.marginal("").unwrap(), 1.0);
        let sym = lavine(5);
        for (eps, want) in [("1", 0.5), ("010", 0.125), ("11011", 1.0 / 32.0)] {
            assert!((sym.marginal(eps).unwrap() - want).abs() < 1e-15);
        }
        assert!(sym.marginal("000000").is_err());
    }

    #[test]
    fn polya_marginals_sum_to_one() {
        let t = PolyaTreeModel::new(
            AnalyticFamily::standard_normal(),
            6,
            PolyaParams::LevelPower { c: 0.7, exponent: 1.3 },
        )
        .unwrap();
        let mut alpha = BTreeMap::new();
        for l in 1..=4usize {
            for j in 0..1usize << l {
                let eps: String = (0..l)
                    .map(|b| if (j >> (l - 1 - b)) & 1 == 1 { '1' } else { '0' })
                    .collect();
                alpha.insert(eps, 0.5 + ((j * 7 + l * 3) % 5) as f64);
            }
        }
        let u = PolyaTreeModel::new(AnalyticFamily::standard_normal(), 4, PolyaParams::Explicit { alpha }).unwrap();
        for (m, k) in [(&t, 6usize), (&u, 4)] {
            let total: f64 = (0..1usize << k)
                .map(|j| {
                    let eps: String = (0..k)
                        .map(|b| if (j >> (k - 1 - b)) & 1 == 1 { '1' } else { '0' })
                        .collect();
                    m.marginal(&eps).unwrap()
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polya_predictive_agrees_with_marginal_and_posterior() {
        let mut rng = RngState::from_seed_u64(9);
        let t = lavine(3);
        let m = ExchangeableModel::PolyaTree(t.clone());
        let v = m
            .predictive_expectation(&Sample::empty(), &TestFn::Indicator { y: 0.25 })
            .unwrap();
        assert!((v.value - t.marginal("00").unwrap()).abs() < 1e-15);
        let v = m.predictive_expectation(&Sample::empty(), &TestFn::Identity).unwrap();
        assert!((v.value - 0.5).abs() < 1e-15);

        let h = Sample::from_scalars(&[0.1, 0.15, 0.8]);
        let exact = m
            .predictive_expectation(&h, &TestFn::Indicator { y: 0.5 })
            .unwrap()
            .value;
        let draws: Vec<f64> = (0..20_000)
            .map(|_| integrate_indicator(&m.posterior_draw(&h, &mut rng).unwrap(), 0.5))
            .collect();
        let est = Estimate::from_draws(&draws);
        assert!((est.value - exact).abs() < 4.0 * est.stderr);

        let pair = m
            .predictive_pair_expectation(&h, &PairFn::Product, 1, &mut rng)
            .unwrap()
            .value;
        let draws: Vec<f64> = (0..100_000)
            .map(|_| {
                let s = m.continue_sequence(&h, 5, &mut rng).unwrap().scalars().unwrap();
                s[3] * s[4]
            })
            .collect();
        let est = Estimate::from_draws(&draws);
        assert!((est.value - pair).abs() < 4.0 * est.stderr);
    }

    fn integrate_indicator(p: &AtomicMeasure<f64>, y: f64) -> f64 {
        p.atoms()
            .filter(|(x, _)| x.as_scalar().unwrap() <= y)
            .map(|(_, w)| w)
            .sum()
    }

    #[test]
    fn stick_breaking_with_unit_sticks_matches_dp() {
        let mut rng = RngState::from_seed_u64(10);
        let sb = ExchangeableModel::StickBreaking(
            StickBreakingModel::new(BetaRule::Constant { a: 1.0, b: 1.0 }, AnalyticFamily::standard_normal()).unwrap(),
        );
        let h = Sample::from_scalars(&[2.0]);
        assert_eq!(
            sb.predictive_expectation(&h, &TestFn::Identity).unwrap_err().code(),
            "posterior-unavailable"
        );
        let est = sb
            .predictive_expectation_mc(&h, &TestFn::Identity, 4000, &mut rng)
            .unwrap();
        assert!((est.value - 1.0).abs() < 4.0 * est.stderr, "{est:?}");
        let est = sb
            .predictive_pair_expectation(&Sample::empty(), &PairFn::Product, 4000, &mut rng)
            .unwrap();
        assert!((est.value - 0.5).abs() < 4.0 * est.stderr, "{est:?}");

        let long = Sample::from_scalars(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(
            sb.posterior_draw(&long, &mut rng).unwrap_err().code(),
            "posterior-unavailable"
        );
    }

    fn pattern3(s: &Sample<f64>) -> usize {
        let v = s.values();
        match (v[0] == v[1], v[0] == v[2], v[1] == v[2]) {
            (true, true, _) => 0,
            (true, false, _) => 1,
            (false, true, _) => 2,
            (false, false, true) => 3,
            _ => 4,
        }
    }

    #[test]
    fn pair_patterns_are_permutation_invariant() {
        let mut rng = RngState::from_seed_u64(11);
        let trials = 100_000;
        for m in [fd11(), dp(1.0)] {
            let mut counts = [0usize; 5];
            for _ in 0..trials {
                counts[pattern3(&m.sample_sequence(3, &mut rng).unwrap())] += 1;
            }
            // the three "exactly one pair" patterns must be equally likely
            let n = trials as f64;
            for (a, b) in [(1, 2), (1, 3), (2, 3)] {
                let (pa, pb) = (counts[a] as f64 / n, counts[b] as f64 / n);
                let se = ((pa + pb) / n).sqrt();
                assert!((pa - pb).abs() < 4.0 * se, "{counts:?}");
            }
        }
    }

    #[test]
    fn posterior_mean_is_the_predictive() {
        let mut rng = RngState::from_seed_u64(12);
        let h = Sample::from_labels(&[1, 0, 1]);
        let m = fd11();
        let exact = m
            .predictive_expectation(&h, &TestFn::LabelIndicator { label: 1 })
            .unwrap()
            .value;
        let w: Vec<f64> = (0..10_000)
            .map(|_| m.posterior_draw(&h, &mut rng).unwrap().mass_at(&Point::Label(1)))
            .collect();
        let est = Estimate::from_draws(&w);
        assert!((est.value - exact).abs() < 4.0 * est.stderr);

        let h = Sample::from_scalars(&[-0.3, 1.1]);
        let m = dp(2.0);
        let exact = m
            .predictive_expectation(&h, &TestFn::Indicator { y: 0.0 })
            .unwrap()
            .value;
        let w: Vec<f64> = (0..10_000)
            .map(|_| integrate_indicator(&m.posterior_draw(&h, &mut rng).unwrap(), 0.0))
            .collect();
        let est = Estimate::from_draws(&w);
        assert!((est.value - exact).abs() < 4.0 * est.stderr);
    }

    #[test]
    fn continuation_composes() {
        let mut rng = RngState::from_seed_u64(13);
        let h = Sample::from_labels(&[0]);
        let m = ExchangeableModel::FiniteDirichlet(FiniteDirichletModel::new(vec![0.5, 1.5]).unwrap());
        let trials = 100_000;
        let mut once = [0usize; 4];
        let mut twice = [0usize; 4];
        let zeros = |s: &Sample<f64>| s.values()[1..].iter().filter(|p| **p == Point::Label(0)).count();
        for _ in 0..trials {
            once[zeros(&m.continue_sequence(&h, 4, &mut rng).unwrap())] += 1;
            let mid = m.continue_sequence(&h, 2, &mut rng).unwrap();
            twice[zeros(&m.continue_sequence(&mid, 4, &mut rng).unwrap())] += 1;
        }
        let n = trials as f64;
        for k in 0..4 {
            let (a, b) = (once[k] as f64 / n, twice[k] as f64 / n);
            let se = ((a * (1.0 - a) + b * (1.0 - b)) / n).sqrt();
            assert!((a - b).abs() < 4.0 * se + 1e-12, "{once:?} {twice:?}");
        }
    }

    #[test]
    fn model_json_round_trip() {
        let m = ExchangeableModel::from_json(
            r#"{"kind":"dirichlet_process","mass":2,"base":{"family":"gaussian","mu":0,"sigma":1},"max_sticks":4096,"residual_tol":1e-8}"#,
        )
        .unwrap();
        let back = ExchangeableModel::from_json(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(m, back);
        let m = ExchangeableModel::from_json(r#"{"kind":"finite_dirichlet","alpha":[1,2,3]}"#).unwrap();
        assert_eq!(m.space(), SpaceTag::FiniteAlphabet { k: 3 });
        let bad = ExchangeableModel::from_json(
            r#"{"kind":"dirichlet_process","mass":1,"base":{"family":"gaussian","mu":0,"sigma":1},"residual_tol":0.5}"#,
        );
        assert!(bad.is_err());
        let pt = ExchangeableModel::from_json(
            r#"{"kind":"polya_tree","base":{"family":"uniform","a":0,"b":1},"depth":4,"params":{"rule":"level_power","c":1,"exponent":2}}"#,
        );
        assert!(pt.is_ok());
    }
}
