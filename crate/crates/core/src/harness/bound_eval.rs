use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::bounds::*;
use crate::error::{Error, Result};

/// Bound names accepted by [`evaluate_bound`] (a trailing `_bound` is also
/// accepted).
pub const BOUND_NAMES: [&str; 13] = [
    "mean_unconditional",
    "mean_conditional",
    "finite",
    "real",
    "bounded_support",
    "l21_moment",
    "tail_probability",
    "euclidean",
    "euclidean_psi",
    "gamma",
    "lemma",
    "median_cdf",
    "median_tails",
];

fn params<P: DeserializeOwned>(v: &Value) -> Result<P> {
    P::deserialize(v).map_err(|e| Error::Config(format!("bad parameters: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeanU {
    #[serde(rename = "N")]
    big_n: usize,
    #[serde(rename = "Ef2")]
    ef2: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeanC {
    n: usize,
    #[serde(rename = "N")]
    big_n: usize,
    sample_mean_f: f64,
    post_mean_f: f64,
    pred_f2: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Finite {
    k: usize,
    n: usize,
    #[serde(rename = "N")]
    big_n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Real {
    n: usize,
    #[serde(rename = "N")]
    big_n: usize,
    post_l21: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Support {
    #[serde(rename = "M")]
    m: f64,
    n: usize,
    #[serde(rename = "N")]
    big_n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Moment {
    delta: f64,
    m2delta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Tail {
    epsilon: f64,
    e_l21: f64,
    n: usize,
    #[serde(rename = "N")]
    big_n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Euclid {
    d: usize,
    k: usize,
    n: usize,
    #[serde(rename = "N")]
    big_n: usize,
    gamma_moment_post: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EuclidPsi {
    k: usize,
    n: usize,
    #[serde(rename = "N")]
    big_n: usize,
    psi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Gamma {
    d: usize,
    k: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Lemma {
    post_e: f64,
    n: usize,
    #[serde(rename = "N")]
    big_n: usize,
    #[serde(rename = "K")]
    k_sup: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Tails {
    #[serde(rename = "N")]
    big_n: usize,
    #[serde(rename = "F", default)]
    f_at_x: Option<f64>,
    p_left: f64,
    p_right: f64,
}

/// Evaluates a named bound on JSON parameters, returning
/// `{"bound": name, "value": v}` (or `left`/`right` for the median tails).
pub fn evaluate_bound(name: &str, p: &Value) -> Result<Value> {
    let key = name.strip_suffix("_bound").unwrap_or(name);
    let value: f64 = match key {
        "mean_unconditional" => {
            let q: MeanU = params(p)?;
            mean_bound_unconditional(q.big_n, q.ef2)?
        }
        "mean_conditional" => {
            let q: MeanC = params(p)?;
            mean_bound_conditional(q.n, q.big_n, q.sample_mean_f, q.post_mean_f, q.pred_f2)?
        }
        "finite" => {
            let q: Finite = params(p)?;
            finite_bound(q.k, q.n, q.big_n)?
        }
        "real" => {
            let q: Real = params(p)?;
            real_bound(q.n, q.big_n, q.post_l21)?
        }
        "bounded_support" => {
            let q: Support = params(p)?;
            bounded_support_bound(q.m, q.n, q.big_n)?
        }
        "l21_moment" => {
            let q: Moment = params(p)?;
            l21_moment_bound(q.delta, q.m2delta)?
        }
        "tail_probability" => {
            let q: Tail = params(p)?;
            tail_probability_bound(q.epsilon, q.e_l21, q.n, q.big_n)?
        }
        "euclidean" => {
            let q: Euclid = params(p)?;
            euclidean_bound(q.d, q.k, q.n, q.big_n, q.gamma_moment_post)?
        }
        "euclidean_psi" => {
            let q: EuclidPsi = params(p)?;
            euclidean_bound_from_psi(q.k, q.n, q.big_n, q.psi)?
        }
        "gamma" => {
            let q: Gamma = params(p)?;
            gamma_of(q.d, q.k)?
        }
        "lemma" => {
            let q: Lemma = params(p)?;
            lemma_bound(q.post_e, q.n, q.big_n, q.k_sup)?
        }
        "median_cdf" => {
            let q: MedianLawInputs<f64> = params(p)?;
            median_cdf(q)?
        }
        "median_tails" => {
            let q: Tails = params(p)?;
            let input = MedianLawInputs {
                big_n: q.big_n,
                f_at_x: q.f_at_x.unwrap_or(q.p_left),
            };
            let (left, right) = median_tail_bounds(input, q.p_left, q.p_right)?;
            return Ok(json!({ "bound": key, "left": left, "right": right }));
        }
        other => {
            return Err(Error::Config(format!(
                "unknown bound {other:?}; expected one of {}",
                BOUND_NAMES.join(", ")
            )))
        }
    };
    Ok(json!({ "bound": key, "value": value }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(name: &str, p: Value) -> f64 {
        evaluate_bound(name, &p).unwrap()["value"].as_f64().unwrap()
    }

    #[test]
    fn evaluates_named_bounds() {
        assert!((value("finite", json!({"k": 3, "n": 10, "N": 100})) - 0.179_057).abs() < 1e-6);
        assert_eq!(
            value("finite_bound", json!({"k": 2, "n": 0, "N": 2})),
            2.0 / (4.0 * 2f64.sqrt())
        );
        assert!((value("mean_unconditional", json!({"N": 100, "Ef2": 1.0})) - 0.2).abs() < 1e-15);
        assert!((value("median_cdf", json!({"N": 1, "F": 0.3})) - 0.216).abs() < 1e-15);
        let tails = evaluate_bound("median_tails", &json!({"N": 1, "p_left": 0.1, "p_right": 0.2})).unwrap();
        assert!((tails["left"].as_f64().unwrap() - 0.3).abs() < 1e-15);
        assert!((tails["right"].as_f64().unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn every_listed_name_is_known() {
        for name in BOUND_NAMES {
            let err = evaluate_bound(name, &json!({}));
            match err {
                Err(Error::Config(msg)) => assert!(!msg.starts_with("unknown bound"), "{name}: {msg}"),
                other => panic!("{name}: {other:?}"),
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(evaluate_bound("nope", &json!({})), Err(Error::Config(_))));
        assert!(evaluate_bound("finite", &json!({"k": 3, "n": 10})).is_err());
        assert!(evaluate_bound("finite", &json!({"k": 3, "n": 10, "N": 100, "x": 1})).is_err());
        assert!(evaluate_bound("finite", &json!({"k": 3, "n": 100, "N": 10})).is_err());
    }
}
