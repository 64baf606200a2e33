use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{AnalyticFamily, Point};
use crate::quadrature::expect_under;

const QUAD_TOL: f64 = 1e-11;

/// A real test function on observations.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "snake_case")]
pub enum TestFn {
    Identity,
    Square,
    /// `1{x <= y}`.
    Indicator {
        y: f64,
    },
    /// `|x - c|`.
    AbsDev {
        c: f64,
    },
    /// `|x|^p`.
    AbsPower {
        p: f64,
    },
    Constant {
        value: f64,
    },
    /// `1{x = a_label}` on a finite alphabet.
    LabelIndicator {
        label: usize,
    },
    #[serde(skip)]
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for TestFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFn::Identity => write!(f, "Identity"),
            TestFn::Square => write!(f, "Square"),
            TestFn::Indicator { y } => write!(f, "Indicator({y})"),
            TestFn::AbsDev { c } => write!(f, "AbsDev({c})"),
            TestFn::AbsPower { p } => write!(f, "AbsPower({p})"),
            TestFn::Constant { value } => write!(f, "Constant({value})"),
            TestFn::LabelIndicator { label } => write!(f, "LabelIndicator({label})"),
            TestFn::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl TestFn {
    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        TestFn::Custom(Arc::new(f))
    }

    /// Value at a real point.
    pub fn at(&self, x: f64) -> f64 {
        match self {
            TestFn::Identity => x,
            TestFn::Square => x * x,
            TestFn::Indicator { y } => f64::from(x <= *y),
            TestFn::AbsDev { c } => (x - c).abs(),
            TestFn::AbsPower { p } => x.abs().powf(*p),
            TestFn::Constant { value } => *value,
            TestFn::LabelIndicator { .. } => f64::NAN,
            TestFn::Custom(f) => f(x),
        }
    }

    /// Value at an observation; labels are read as their index.
    pub fn eval(&self, p: &Point<f64>) -> Result<f64> {
        let v = match (self, p) {
            (TestFn::LabelIndicator { label }, Point::Label(l)) => f64::from(l == label),
            (TestFn::Constant { value }, _) => *value,
            (_, Point::Label(l)) => self.at(*l as f64),
            (_, Point::Scalar(x)) => self.at(*x),
            (_, Point::Vector(_)) => {
                return Err(Error::SpaceMismatch(
                    "test functions act on scalars or labels".to_string(),
                ))
            }
        };
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand(p.to_string()));
        }
        Ok(v)
    }

    /// `int f d(base)`, in closed form where available.
    pub fn base_expectation(&self, base: &AnalyticFamily) -> Result<f64> {
        let v = match self {
            TestFn::Identity => base.mean(),
            TestFn::Square => base.second_moment(),
            TestFn::Indicator { y } => base.cdf(*y),
            TestFn::AbsDev { c } => base.abs_dev(*c),
            TestFn::AbsPower { p } => base.abs_moment(*p),
            TestFn::Constant { value } => *value,
            TestFn::LabelIndicator { .. } => {
                return Err(Error::SpaceMismatch(
                    "label indicator under a continuous base".to_string(),
                ))
            }
            TestFn::Custom(f) => expect_under(base, |x| f(x), QUAD_TOL),
        };
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand(format!("{self:?} under the base measure")));
        }
        Ok(v)
    }
}

/// A real function of two observations.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "snake_case")]
pub enum PairFn {
    /// `x * y`.
    Product,
    /// `|x - y|`.
    AbsDiff,
    Constant {
        value: f64,
    },
    /// `1{x = y = a_label}`.
    BothLabel {
        label: usize,
    },
    #[serde(skip)]
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for PairFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairFn::Product => write!(f, "Product"),
            PairFn::AbsDiff => write!(f, "AbsDiff"),
            PairFn::Constant { value } => write!(f, "Constant({value})"),
            PairFn::BothLabel { label } => write!(f, "BothLabel({label})"),
            PairFn::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl PairFn {
    pub fn custom<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        PairFn::Custom(Arc::new(f))
    }

    pub fn at(&self, x: f64, y: f64) -> f64 {
        match self {
            PairFn::Product => x * y,
            PairFn::AbsDiff => (x - y).abs(),
            PairFn::Constant { value } => *value,
            PairFn::BothLabel { label } => {
                let a = *label as f64;
                f64::from(x == a && y == a)
            }
            PairFn::Custom(f) => f(x, y),
        }
    }

    pub fn eval(&self, p: &Point<f64>, q: &Point<f64>) -> Result<f64> {
        let v = match (p, q) {
            (Point::Label(a), Point::Label(b)) => self.at(*a as f64, *b as f64),
            (Point::Scalar(x), Point::Scalar(y)) => self.at(*x, *y),
            _ => {
                return Err(Error::SpaceMismatch(
                    "pair functions act on two scalars or two labels".to_string(),
                ))
            }
        };
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand(format!("({p}, {q})")));
        }
        Ok(v)
    }

    /// `E g(x, Y)`, `Y ~ base`.
    pub(crate) fn base_section(&self, x: f64, base: &AnalyticFamily) -> Result<f64> {
        let v = match self {
            PairFn::Product => x * base.mean(),
            PairFn::AbsDiff => base.abs_dev(x),
            PairFn::Constant { value } => *value,
            PairFn::BothLabel { .. } => 0.0,
            PairFn::Custom(f) => expect_under(base, |y| f(x, y), QUAD_TOL),
        };
        finite(v)
    }

    /// `E g(Y, x)`, `Y ~ base`.
    pub(crate) fn base_section_left(&self, x: f64, base: &AnalyticFamily) -> Result<f64> {
        match self {
            PairFn::Custom(f) => finite(expect_under(base, |y| f(y, x), QUAD_TOL)),
            _ => self.base_section(x, base),
        }
    }

    /// `E g(X, Y)` with `X, Y` i.i.d. from `base`.
    pub(crate) fn base_independent(&self, base: &AnalyticFamily) -> Result<f64> {
        let v = match self {
            PairFn::Product => base.mean() * base.mean(),
            PairFn::AbsDiff => base.mean_abs_diff(),
            PairFn::Constant { value } => *value,
            PairFn::BothLabel { .. } => 0.0,
            PairFn::Custom(f) => expect_under(base, |x| expect_under(base, |y| f(x, y), 1e-9), 1e-8),
        };
        finite(v)
    }

    /// `E g(X, X)`, `X ~ base`.
    pub(crate) fn base_diagonal(&self, base: &AnalyticFamily) -> Result<f64> {
        let v = match self {
            PairFn::Product => base.second_moment(),
            PairFn::AbsDiff => 0.0,
            PairFn::Constant { value } => *value,
            PairFn::BothLabel { .. } => 0.0,
            PairFn::Custom(f) => expect_under(base, |x| f(x, x), QUAD_TOL),
        };
        finite(v)
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand("base integral".to_string()))
    }
}
