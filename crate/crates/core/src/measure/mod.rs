//! Probability measures with finite support, distribution functions and the
//! measure-level functionals (moments, Gini mean difference, the
//! `int sqrt(F(1-F))` functional).

mod atomic;
mod cdf;
mod family;
pub mod io;
mod point;

pub use atomic::{empirical, empirical_in, integrate, integrate_scalar, mixture, AtomicMeasure, Support};
pub use cdf::{cdf_of, gini_md, l21_functional, moment, Cdf, StepCdf, L21_DEFAULT_TOL};
pub use family::AnalyticFamily;
pub use point::{Point, Sample, SpaceTag};
