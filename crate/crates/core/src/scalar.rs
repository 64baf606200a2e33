//! Floating-point scalar abstraction shared by the measure, transport and
//! bound code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type used by the generic parts of the crate (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Tolerance on the total mass of a normalized measure.
    const MASS_TOL: f64;
    /// Feasibility tolerance for transport marginals.
    const FEAS_TOL: f64;
    /// Optimality tolerance for duality gaps and Lipschitz slack.
    const OPT_TOL: f64;

    /// Lossy conversion from `f64`.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    /// Conversion from a count.
    #[inline]
    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize is representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f64 {
    const MASS_TOL: f64 = 1e-12;
    const FEAS_TOL: f64 = 1e-10;
    const OPT_TOL: f64 = 1e-9;
}

impl Scalar for f32 {
    const MASS_TOL: f64 = 1e-5;
    const FEAS_TOL: f64 = 1e-5;
    const OPT_TOL: f64 = 1e-4;
}

/// Neumaier-compensated sum; result does not depend on chunking of the input
/// beyond the last ulp.
pub fn compensated_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut c = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}
