//! Closed-form upper bounds on the distance between finitary and classical
//! posterior laws, and the exact law of an odd-sample median.
//!
//! Rate bounds are returned unclamped, even above the diameter of the ground
//! metric; probability-valued bounds are clamped to `[0, 1]`.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::special::{beta_reg, symmetric_beta_exact};

/// Largest `N` for which the median law is evaluated by exact rational
/// arithmetic.
pub const MEDIAN_EXACT_MAX_N: usize = 20;

fn horizon(n: usize, big_n: usize) -> Result<()> {
    if n >= big_n {
        return Err(Error::BadHorizon(format!("need n < N, got n = {n}, N = {big_n}")));
    }
    Ok(())
}

fn nonneg<T: Scalar>(x: T, what: &str) -> Result<T> {
    if !(x >= T::zero() && x.is_finite()) {
        return Err(Error::BadParameter(format!(
            "{what} must be finite and nonnegative, got {x}"
        )));
    }
    Ok(x)
}

fn ratio<T: Scalar>(n: usize, big_n: usize) -> T {
    T::of_usize(n) / T::of_usize(big_n)
}

/// `w1(e_N(f), p(f)) <= 2 sqrt(E f(xi_1)^2) / sqrt(N)`.
pub fn mean_bound_unconditional<T: Scalar>(big_n: usize, ef2: T) -> Result<T> {
    if big_n < 1 {
        return Err(Error::BadHorizon("N must be at least 1".to_string()));
    }
    let ef2 = nonneg(ef2, "E f^2")?;
    Ok(T::two() * ef2.sqrt() / T::of_usize(big_n).sqrt())
}

/// Conditional form:
/// `(n/N)(sample_mean_f + post_mean_f) + 2 sqrt(pred_f2) / sqrt(N - n)`.
pub fn mean_bound_conditional<T: Scalar>(
    n: usize,
    big_n: usize,
    sample_mean_f: T,
    post_mean_f: T,
    pred_f2: T,
) -> Result<T> {
    horizon(n, big_n)?;
    let pred_f2 = nonneg(pred_f2, "predictive second moment")?;
    Ok(
        ratio::<T>(n, big_n) * (sample_mean_f + post_mean_f)
            + T::two() * pred_f2.sqrt() / T::of_usize(big_n - n).sqrt(),
    )
}

/// Finite alphabet with total variation: `k / (4 sqrt(N - n)) + n / N`.
pub fn finite_bound<T: Scalar>(k: usize, n: usize, big_n: usize) -> Result<T> {
    if k < 2 {
        return Err(Error::BadParameter(format!(
            "alphabet size must be at least 2, got {k}"
        )));
    }
    horizon(n, big_n)?;
    Ok(T::of_usize(k) / (T::of(4.0) * T::of_usize(big_n - n).sqrt()) + ratio(n, big_n))
}

/// Real line with `beta`: `E[Delta(p) | xi(n)] / sqrt(N - n) + 2n / N`.
pub fn real_bound<T: Scalar>(n: usize, big_n: usize, post_l21: T) -> Result<T> {
    horizon(n, big_n)?;
    let l21 = nonneg(post_l21, "posterior L21 value")?;
    Ok(l21 / T::of_usize(big_n - n).sqrt() + T::two() * ratio(n, big_n))
}

/// Support in `[-M, M]`: `2M / sqrt(N - n) + 2n / N`.
pub fn bounded_support_bound<T: Scalar>(m: T, n: usize, big_n: usize) -> Result<T> {
    if !(m > T::zero() && m.is_finite()) {
        return Err(Error::BadParameter(format!("support radius must be positive, got {m}")));
    }
    horizon(n, big_n)?;
    Ok(T::two() * m / T::of_usize(big_n - n).sqrt() + T::two() * ratio(n, big_n))
}

/// `Delta(p) <= 1 + C_delta sqrt(int |x|^{2+delta} dp)` with
/// `C_delta = sqrt(2(1+delta)/delta)`.
pub fn l21_moment_bound<T: Scalar>(delta: T, m2delta: T) -> Result<T> {
    if !(delta > T::zero() && delta.is_finite()) {
        return Err(Error::BadParameter(format!("delta must be positive, got {delta}")));
    }
    let m = nonneg(m2delta, "moment of order 2 + delta")?;
    let c = (T::two() * (T::one() + delta) / delta).sqrt();
    Ok(T::one() + c * m.sqrt())
}

/// Markov bound `P{W1 > eps} <= (1/eps)(E Delta / sqrt(N - n) + 2n/N)`,
/// clamped to 1.
pub fn tail_probability_bound<T: Scalar>(epsilon: T, e_l21: T, n: usize, big_n: usize) -> Result<T> {
    if !(epsilon > T::zero()) {
        return Err(Error::BadParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let rate = real_bound(n, big_n, e_l21)?;
    Ok((rate / epsilon).min(T::one()))
}

/// `gamma = kd / ((k - d)(k - 2))`.
pub fn gamma_of<T: Scalar>(d: usize, k: usize) -> Result<T> {
    if d < 2 || k <= d || k <= 2 {
        return Err(Error::BadDudleyParams(format!(
            "need d >= 2 and k > max(d, 2), got d = {d}, k = {k}"
        )));
    }
    Ok(T::of_usize(k * d) / T::of_usize((k - d) * (k - 2)))
}

fn dudley_constant<T: Scalar>(k: usize) -> T {
    T::of(4.0) * T::of(3.0).powi(2 * k as i32)
}

/// `R^d` bound through the moment route:
/// `(N-n)^{-1/k} [4/3 + 4 * 3^{2k} * 2^{d/2} (1 + Y_n)^{1/2}] + 2n/N`
/// with `Y_n = 2 (E[int |x|^gamma dp | xi(n)])^{1/gamma}`.
pub fn euclidean_bound<T: Scalar>(d: usize, k: usize, n: usize, big_n: usize, gamma_moment_post: T) -> Result<T> {
    let gamma: T = gamma_of(d, k)?;
    if gamma < T::one() {
        return Err(Error::GammaBelowOne(gamma.to_f64_lossy()));
    }
    horizon(n, big_n)?;
    let mom = nonneg(gamma_moment_post, "posterior gamma moment")?;
    let y = T::two() * mom.powf(T::one() / gamma);
    let psi = T::two().powf(T::of_usize(d) / T::two()) * (T::one() + y).sqrt();
    euclidean_bound_from_psi(k, n, big_n, psi)
}

/// Same bound with `E[Psi_k(p) | xi(n)]` supplied directly.
pub fn euclidean_bound_from_psi<T: Scalar>(k: usize, n: usize, big_n: usize, psi: T) -> Result<T> {
    if k <= 2 {
        return Err(Error::BadDudleyParams(format!("need k > 2, got {k}")));
    }
    horizon(n, big_n)?;
    let psi = nonneg(psi, "Psi_k")?;
    let rate = T::of_usize(big_n - n).powf(-T::one() / T::of_usize(k));
    Ok(rate * (T::of(4.0 / 3.0) + dudley_constant::<T>(k) * psi) + T::two() * ratio(n, big_n))
}

/// General lemma: `int E_{N-n}(p) Q(dp) + nK/N` for a ground metric bounded
/// by `K`. The integrated term is used as stated, without the extra
/// `(N-n)/N` factor that the argument actually delivers.
pub fn lemma_bound<T: Scalar>(post_e: T, n: usize, big_n: usize, k_sup: T) -> Result<T> {
    horizon(n, big_n)?;
    let e = nonneg(post_e, "expected empirical distance")?;
    let k = nonneg(k_sup, "metric bound")?;
    Ok(e + ratio::<T>(n, big_n) * k)
}

/// Inputs of the median law: sample size `2N + 1` and `F(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianLawInputs<T> {
    #[serde(rename = "N")]
    pub big_n: usize,
    #[serde(rename = "F")]
    pub f_at_x: T,
}

/// `P{M_N <= x} = I_{F(x)}(N+1, N+1)` for the median of `2N+1` i.i.d. draws.
pub fn median_cdf<T: Scalar>(input: MedianLawInputs<T>) -> Result<T> {
    let f = input.f_at_x;
    if !(f >= T::zero() && f <= T::one()) {
        return Err(Error::BadParameter(format!("F(x) = {f} outside [0, 1]")));
    }
    let x = f.to_f64_lossy();
    let value = if input.big_n <= MEDIAN_EXACT_MAX_N {
        let r = BigRational::from_float(x).expect("finite F");
        symmetric_beta_exact(input.big_n, &r).to_f64().unwrap_or(f64::NAN)
    } else {
        let a = input.big_n as f64 + 1.0;
        beta_reg(a, a, x)
    };
    Ok(T::of(value))
}

/// `(min(1, (2N+1)/N p_left), min(1, (2N+1)/N p_right))`.
pub fn median_tail_bounds<T: Scalar>(input: MedianLawInputs<T>, p_left: T, p_right: T) -> Result<(T, T)> {
    if input.big_n < 1 {
        return Err(Error::BadHorizon("tail bounds need N >= 1".to_string()));
    }
    for p in [p_left, p_right] {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::BadParameter(format!("probability {p} outside [0, 1]")));
        }
    }
    let factor = T::of_usize(2 * input.big_n + 1) / T::of_usize(input.big_n);
    Ok(((factor * p_left).min(T::one()), (factor * p_right).min(T::one())))
}
