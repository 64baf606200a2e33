use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Named continuous (or degenerate) distributions on the real line, used as
/// analytic CDFs and as base measures of the priors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AnalyticFamily {
    Uniform { a: f64, b: f64 },
    Gaussian { mu: f64, sigma: f64 },
    PointMass { c: f64 },
}

impl AnalyticFamily {
    pub fn standard_normal() -> Self {
        AnalyticFamily::Gaussian { mu: 0.0, sigma: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            AnalyticFamily::Uniform { a, b } => a.is_finite() && b.is_finite() && a < b,
            AnalyticFamily::Gaussian { mu, sigma } => mu.is_finite() && sigma.is_finite() && sigma > 0.0,
            AnalyticFamily::PointMass { c } => c.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BadParameter(format!("invalid family parameters {self:?}")))
        }
    }

    /// True for the point-mass family.
    pub fn is_atomic(&self) -> bool {
        matches!(self, AnalyticFamily::PointMass { .. })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            AnalyticFamily::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            AnalyticFamily::Gaussian { mu, sigma } => 0.5 * erfc(-(x - mu) / (sigma * std::f64::consts::SQRT_2)),
            AnalyticFamily::PointMass { c } => {
                if x >= c {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Left-continuous inverse `inf {x : F(x) >= u}` for `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            AnalyticFamily::Uniform { a, b } => a + (b - a) * u.clamp(0.0, 1.0),
            AnalyticFamily::Gaussian { mu, sigma } => {
                if u <= 0.0 {
                    f64::NEG_INFINITY
                } else if u >= 1.0 {
                    f64::INFINITY
                } else {
                    mu - sigma * std::f64::consts::SQRT_2 * erfc_inv(2.0 * u)
                }
            }
            AnalyticFamily::PointMass { c } => c,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            AnalyticFamily::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            AnalyticFamily::Gaussian { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mu + sigma * z
            }
            AnalyticFamily::PointMass { c } => c,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            AnalyticFamily::Uniform { a, b } => 0.5 * (a + b),
            AnalyticFamily::Gaussian { mu, .. } => mu,
            AnalyticFamily::PointMass { c } => c,
        }
    }

    /// `E[X^2]`.
    pub fn second_moment(&self) -> f64 {
        match *self {
            AnalyticFamily::Uniform { a, b } => (a * a + a * b + b * b) / 3.0,
            AnalyticFamily::Gaussian { mu, sigma } => mu * mu + sigma * sigma,
            AnalyticFamily::PointMass { c } => c * c,
        }
    }

    /// `E|X - c|`.
    pub fn abs_dev(&self, c: f64) -> f64 {
        match *self {
            AnalyticFamily::Uniform { a, b } => {
                if c <= a {
                    0.5 * (a + b) - c
                } else if c >= b {
                    c - 0.5 * (a + b)
                } else {
                    ((c - a).powi(2) + (b - c).powi(2)) / (2.0 * (b - a))
                }
            }
            AnalyticFamily::Gaussian { mu, sigma } => {
                let z = (c - mu) / sigma;
                let phi = FRAC_1_SQRT_2PI * (-0.5 * z * z).exp();
                let big_phi = 0.5 * erfc(-z / std::f64::consts::SQRT_2);
                sigma * (2.0 * phi + z * (2.0 * big_phi - 1.0))
            }
            AnalyticFamily::PointMass { c: x } => (x - c).abs(),
        }
    }

    /// `E|X - Y|` for independent copies.
    pub fn mean_abs_diff(&self) -> f64 {
        match *self {
            AnalyticFamily::Uniform { a, b } => (b - a) / 3.0,
            AnalyticFamily::Gaussian { sigma, .. } => 2.0 * sigma / std::f64::consts::PI.sqrt(),
            AnalyticFamily::PointMass { .. } => 0.0,
        }
    }

    /// `E|X|^p`, by quadrature except for the point mass.
    pub fn abs_moment(&self, p: f64) -> f64 {
        match *self {
            AnalyticFamily::PointMass { c } => c.abs().powf(p),
            AnalyticFamily::Uniform { a, b } => {
                // antiderivative of |x|^p is sign(x)|x|^{p+1}/(p+1)
                let g = |x: f64| x.signum() * x.abs().powf(p + 1.0) / (p + 1.0);
                (g(b) - g(a)) / (b - a)
            }
            AnalyticFamily::Gaussian { .. } => crate::quadrature::expect_under(self, |x| x.abs().powf(p), 1e-11),
        }
    }

    /// Support clipped where `F < eps` or `1 - F < eps`.
    pub fn effective_range(&self, eps: f64) -> (f64, f64) {
        match *self {
            AnalyticFamily::Uniform { a, b } => (a, b),
            AnalyticFamily::PointMass { c } => (c, c),
            AnalyticFamily::Gaussian { .. } => (self.quantile(eps), self.quantile(1.0 - eps)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::expect_under;

    #[test]
    fn closed_forms_match_quadrature() {
        let fams = [
            AnalyticFamily::Uniform { a: -1.0, b: 3.0 },
            AnalyticFamily::Gaussian { mu: 0.5, sigma: 2.0 },
        ];
        for fam in fams {
            assert!((expect_under(&fam, |x| x, 1e-11) - fam.mean()).abs() < 1e-8);
            assert!((expect_under(&fam, |x| x * x, 1e-11) - fam.second_moment()).abs() < 1e-7);
            for c in [-2.0, 0.0, 0.7, 5.0] {
                let q = expect_under(&fam, |x| (x - c).abs(), 1e-11);
                assert!((q - fam.abs_dev(c)).abs() < 1e-7, "{fam:?} {c}");
            }
            let g = expect_under(&fam, |x| fam.abs_dev(x), 1e-11);
            assert!((g - fam.mean_abs_diff()).abs() < 1e-7);
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let g = AnalyticFamily::Gaussian { mu: 1.0, sigma: 0.5 };
        for u in [1e-9, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-9] {
            assert!((g.cdf(g.quantile(u)) - u).abs() < 1e-12 * (1.0 + 1.0 / u.min(1.0 - u)));
        }
        assert_eq!(g.quantile(0.5), 1.0);
    }
}
