use serde::{Deserialize, Serialize};

use super::atomic::AtomicMeasure;
use super::family::AnalyticFamily;
use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::scalar::{compensated_sum, Scalar};

/// Right-continuous step distribution function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCdf<T> {
    thresholds: Vec<T>,
    cumulative: Vec<T>,
}

impl<T: Scalar> StepCdf<T> {
    pub fn new(thresholds: Vec<T>, mut cumulative: Vec<T>) -> Result<Self> {
        if thresholds.is_empty() || thresholds.len() != cumulative.len() {
            return Err(Error::InvalidCdf(
                "thresholds and cumulative values must be non-empty and aligned".into(),
            ));
        }
        if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidCdf("thresholds must be strictly increasing".into()));
        }
        if cumulative.windows(2).any(|w| w[1] < w[0]) || cumulative.iter().any(|c| !(*c >= T::zero() && *c <= T::one()))
        {
            return Err(Error::InvalidCdf(
                "cumulative values must be non-decreasing in [0, 1]".into(),
            ));
        }
        let last = cumulative.last_mut().unwrap();
        if (last.to_f64_lossy() - 1.0).abs() > T::MASS_TOL {
            return Err(Error::InvalidCdf(format!("final cumulative value {last} is not 1")));
        }
        *last = T::one();
        Ok(Self { thresholds, cumulative })
    }

    pub fn thresholds(&self) -> &[T] {
        &self.thresholds
    }

    pub fn cumulative(&self) -> &[T] {
        &self.cumulative
    }

    pub fn steps(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.thresholds.iter().copied().zip(self.cumulative.iter().copied())
    }

    pub fn eval(&self, x: T) -> T {
        // number of thresholds <= x
        let k = self.thresholds.partition_point(|t| *t <= x);
        if k == 0 {
            T::zero()
        } else {
            self.cumulative[k - 1]
        }
    }
}

/// Distribution function `F_p(x) = p((-inf, x])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cdf<T> {
    Step(StepCdf<T>),
    Analytic(AnalyticFamily),
}

impl<T: Scalar> Cdf<T> {
    pub fn eval(&self, x: T) -> T {
        match self {
            Cdf::Step(s) => s.eval(x),
            Cdf::Analytic(f) => T::of(f.cdf(x.to_f64_lossy())),
        }
    }
}

/// Step CDF of a measure on the real line.
pub fn cdf_of<T: Scalar>(measure: &AtomicMeasure<T>) -> Result<Cdf<T>> {
    let xs = measure
        .scalar_points()
        .ok_or_else(|| Error::SpaceMismatch(format!("cdf requires the real line, got {}", measure.space())))?;
    let w = measure.weights();
    let mut cumulative = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        cumulative.push(compensated_sum(w[..=i].iter().copied()).min(T::one()));
    }
    if let Some(last) = cumulative.last_mut() {
        *last = T::one();
    }
    Ok(Cdf::Step(StepCdf::new(xs.to_vec(), cumulative)?))
}

/// Default absolute tolerance for the analytic branch of [`l21_functional`].
pub const L21_DEFAULT_TOL: f64 = 1e-9;
const L21_CLIP: f64 = 1e-15;

/// `int sqrt(F(t)(1 - F(t))) dt`.
///
/// Exact for step functions; adaptive quadrature with absolute error `tol`
/// for analytic families, with the range clipped where `F` or `1 - F` drops
/// below `1e-15`.
pub fn l21_functional<T: Scalar>(cdf: &Cdf<T>, tol: T) -> Result<T> {
    match cdf {
        Cdf::Step(s) => {
            let t = s.thresholds();
            let c = s.cumulative();
            let terms = (0..t.len().saturating_sub(1))
                .map(|i| (c[i] * (T::one() - c[i])).max(T::zero()).sqrt() * (t[i + 1] - t[i]));
            Ok(compensated_sum(terms))
        }
        Cdf::Analytic(fam) => {
            fam.validate()?;
            if fam.is_atomic() {
                return Ok(T::zero());
            }
            let (lo, hi) = fam.effective_range(L21_CLIP);
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::L21Divergent(format!("unbounded effective range for {fam:?}")));
            }
            let tol = tol.to_f64_lossy().max(1e-15);
            let (v, err) = integrate_adaptive(
                |x| {
                    let f = fam.cdf(x);
                    (f * (1.0 - f)).max(0.0).sqrt()
                },
                lo,
                hi,
                tol,
            );
            if !v.is_finite() || err > 1e3 * tol {
                return Err(Error::L21Divergent(format!(
                    "quadrature did not converge (error {err:e})"
                )));
            }
            Ok(T::of(v))
        }
    }
}

/// Gini mean difference `sum_ij w_i w_j |x_i - x_j|`.
pub fn gini_md<T: Scalar>(measure: &AtomicMeasure<T>) -> Result<T> {
    let xs = measure.scalar_points().ok_or_else(|| {
        Error::SpaceMismatch(format!(
            "gini mean difference requires the real line, got {}",
            measure.space()
        ))
    })?;
    // sorted support: sum_{i<j} w_i w_j (x_j - x_i), doubled
    let w = measure.weights();
    let mut prefix_w = T::zero();
    let mut prefix_wx = T::zero();
    let mut terms = Vec::with_capacity(xs.len());
    for (&x, &wj) in xs.iter().zip(w) {
        terms.push(wj * (x * prefix_w - prefix_wx));
        prefix_w += wj;
        prefix_wx += wj * x;
    }
    Ok(T::two() * compensated_sum(terms))
}

/// `sum_i w_i ||x_i||^order`.
pub fn moment<T: Scalar>(measure: &AtomicMeasure<T>, order: T) -> Result<T> {
    if !(order > T::zero()) {
        return Err(Error::BadParameter(format!("moment order {order} must be positive")));
    }
    let mut terms = Vec::with_capacity(measure.len());
    for (p, w) in measure.atoms() {
        terms.push(w * p.norm()?.powf(order));
    }
    Ok(compensated_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Point, SpaceTag};

    #[test]
    fn cdf_of_examples() {
        let m = AtomicMeasure::scalar(&[0.0, 1.0], &[0.5, 0.5]).unwrap();
        let Cdf::Step(s) = cdf_of(&m).unwrap() else { panic!() };
        assert_eq!(s.steps().collect::<Vec<_>>(), vec![(0.0, 0.5), (1.0, 1.0)]);
        let m = AtomicMeasure::<f64>::scalar(&[-1.0, 0.0, 2.0], &[0.2, 0.3, 0.5]).unwrap();
        let Cdf::Step(s) = cdf_of(&m).unwrap() else { panic!() };
        assert_eq!(s.thresholds(), &[-1.0, 0.0, 2.0]);
        assert!((s.cumulative()[1] - 0.5).abs() < 1e-15);
        assert_eq!(s.cumulative()[2], 1.0);
        assert_eq!(s.eval(-2.0), 0.0);
        assert_eq!(s.eval(-1.0), 0.2);
        assert_eq!(s.eval(1.5), s.cumulative()[1]);
        let d = AtomicMeasure::<f64>::finite(&[1.0]).unwrap();
        assert_eq!(cdf_of(&d).unwrap_err().code(), "space-mismatch");
    }

    #[test]
    fn l21_examples() {
        let u = Cdf::<f64>::Analytic(AnalyticFamily::Uniform { a: 0.0, b: 1.0 });
        let v = l21_functional(&u, 1e-9).unwrap();
        assert!((v - std::f64::consts::PI / 8.0).abs() < 1e-8);
        let m = AtomicMeasure::<f64>::scalar(&[0.0, 1.0], &[0.5, 0.5]).unwrap();
        assert!((l21_functional(&cdf_of(&m).unwrap(), 1e-9).unwrap() - 0.5).abs() < 1e-15);
        let d = AtomicMeasure::scalar(&[3.0], &[1.0]).unwrap();
        assert_eq!(l21_functional(&cdf_of(&d).unwrap(), 1e-9).unwrap(), 0.0);
        let pm = Cdf::<f64>::Analytic(AnalyticFamily::PointMass { c: 2.0 });
        assert_eq!(l21_functional(&pm, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn l21_gaussian_scales_with_sigma() {
        let g1 = l21_functional(
            &Cdf::<f64>::Analytic(AnalyticFamily::Gaussian { mu: 0.0, sigma: 1.0 }),
            1e-10,
        )
        .unwrap();
        let g3 = l21_functional(
            &Cdf::<f64>::Analytic(AnalyticFamily::Gaussian { mu: 5.0, sigma: 3.0 }),
            1e-10,
        )
        .unwrap();
        assert!((g3 - 3.0 * g1).abs() < 1e-7);
        assert!(g1 > 0.0 && g1 < 4.0);
    }

    #[test]
    fn gini_examples() {
        let d = AtomicMeasure::scalar(&[3.0], &[1.0]).unwrap();
        assert_eq!(gini_md(&d).unwrap(), 0.0);
        let m = AtomicMeasure::scalar(&[0.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(gini_md(&m).unwrap(), 0.5);
        let t = AtomicMeasure::<f64>::uniform_scalars(&[0.0, 1.0, 2.0]).unwrap();
        assert!((gini_md(&t).unwrap() - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn moment_examples() {
        let d = AtomicMeasure::scalar(&[0.0], &[1.0]).unwrap();
        assert_eq!(moment(&d, 2.5).unwrap(), 0.0);
        let m = AtomicMeasure::scalar(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(moment(&m, 2.0).unwrap(), 1.0);
        let m = AtomicMeasure::scalar(&[1.0, 3.0], &[0.25, 0.75]).unwrap();
        assert_eq!(moment(&m, 1.0).unwrap(), 2.5);
        let v = AtomicMeasure::new(
            SpaceTag::Euclidean { d: 2 },
            vec![(Point::Vector(vec![3.0f64, 4.0]), 1.0)],
        )
        .unwrap();
        assert!((moment(&v, 1.0).unwrap() - 5.0).abs() < 1e-15);
        let l = AtomicMeasure::<f64>::finite(&[1.0]).unwrap();
        assert_eq!(moment(&l, 1.0).unwrap_err().code(), "space-mismatch");
    }
}
