use std::f64::consts::PI;

use crate::bounds::{finite_bound, mean_bound_unconditional, median_cdf, MedianLawInputs};
use crate::error::Result;
use crate::estimators::{variance_estimators, EstimatorInputs};
use crate::measure::{cdf_of, gini_md, l21_functional, AtomicMeasure, Cdf, Sample};
use crate::priors::{DirichletProcessModel, ExchangeableModel, FiniteDirichletModel, TestFn};
use crate::rng::mix_seed;
use crate::special::beta_reg;
use crate::transport::{bounded_lipschitz, solve_discrete_ot, w1_real, CostMatrix};
use crate::AnalyticFamily;

/// Golden value of `mix_seed(0, 0, 0)`.
pub const GOLDEN_MIX_000: u64 = 4_071_804_116_587_773_922;

#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, got: Result<f64>, want: f64, tol: f64) -> SelfCheck {
    match got {
        Ok(v) => SelfCheck {
            name,
            passed: (v - want).abs() <= tol,
            detail: format!("got {v:.17e}, want {want:.17e} (tol {tol:e})"),
        },
        Err(e) => SelfCheck {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Fast closed-form oracles exercising every module.
pub fn selftest() -> Vec<SelfCheck> {
    let mut out = vec![SelfCheck {
        name: "mix_seed(0,0,0) golden value",
        passed: mix_seed(0, 0, 0) == GOLDEN_MIX_000,
        detail: format!("got {}", mix_seed(0, 0, 0)),
    }];
    out.push(check(
        "finite_bound(2,0,2)",
        finite_bound(2, 0, 2),
        2.0 / (4.0 * 2f64.sqrt()),
        1e-15,
    ));
    out.push(check(
        "finite_bound(3,10,100)",
        finite_bound(3, 10, 100),
        0.179_057,
        1e-6,
    ));
    out.push(check(
        "mean_bound_unconditional(100,1)",
        mean_bound_unconditional(100, 1.0),
        0.2,
        1e-15,
    ));
    out.push(check(
        "median_cdf(N=1, F=0.3)",
        median_cdf(MedianLawInputs { big_n: 1, f_at_x: 0.3 }),
        0.216,
        1e-15,
    ));
    out.push(check("I_0.3(2,2)", Ok(beta_reg(2.0, 2.0, 0.3)), 0.216, 1e-14));
    out.push(check(
        "l21_functional(Uniform(0,1))",
        l21_functional(&Cdf::Analytic(AnalyticFamily::Uniform { a: 0.0, b: 1.0 }), 1e-10),
        PI / 8.0,
        1e-6,
    ));
    let half = AtomicMeasure::uniform_scalars(&[0.0, 1.0]);
    out.push(check(
        "gini_md({0,1})",
        half.clone().and_then(|m| gini_md(&m)),
        0.5,
        0.0,
    ));
    out.push(check(
        "l21_functional of a two-point law",
        half.clone().and_then(|m| l21_functional(&cdf_of(&m)?, 1e-12)),
        0.5,
        1e-15,
    ));
    let p = AtomicMeasure::uniform_scalars(&[0.0]);
    let q = AtomicMeasure::uniform_scalars(&[0.5]);
    out.push(check(
        "beta(delta_0, delta_0.5)",
        p.clone().and_then(|p| Ok(bounded_lipschitz(&p, &q.clone()?)?.0)),
        0.5,
        1e-12,
    ));
    out.push(check(
        "w1(delta_0, delta_0.5)",
        p.and_then(|p| w1_real(&p, &q?)),
        0.5,
        0.0,
    ));
    out.push(check(
        "2x2 assignment",
        CostMatrix::from_rows(&[vec![3.0, 1.0], vec![2.0, 4.0]])
            .and_then(|c| Ok(solve_discrete_ot(&c, &[0.5, 0.5], &[0.5, 0.5])?.cost)),
        1.5,
        1e-15,
    ));
    let dp =
        DirichletProcessModel::new(1.0, AnalyticFamily::standard_normal()).map(ExchangeableModel::DirichletProcess);
    out.push(check(
        "DP predictive mean after [2]",
        dp.and_then(|m| {
            Ok(
                m.predictive_expectation(&Sample::from_scalars(&[2.0]), &TestFn::Identity)?
                    .value,
            )
        }),
        1.0,
        1e-15,
    ));
    let coin = FiniteDirichletModel::on_points(vec![1.0, 1.0], vec![0.0, 1.0]).map(ExchangeableModel::FiniteDirichlet);
    out.push(check(
        "finitary variance, two-point urn, N=2",
        coin.and_then(|m| Ok(variance_estimators(&EstimatorInputs::new(m, Sample::empty(), 2)?)?.finitary)),
        1.0 / 12.0,
        1e-15,
    ));
    out
}
