//! Log-gamma and the regularized incomplete beta function.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

const CF_MAX_ITER: usize = 10_000;
const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;

/// Regularized incomplete beta `I_x(a, b)` by Lentz's continued fraction,
/// evaluated on the side of the symmetry `I_x(a,b) = 1 - I_{1-x}(b,a)` where
/// it converges fastest.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "beta_reg requires positive shape parameters");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if a == b && x == 0.5 {
        return 0.5;
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        1.0 - beta_reg_cf(b, a, 1.0 - x)
    } else {
        beta_reg_cf(a, b, x)
    }
}

fn beta_reg_cf(a: f64, b: f64, x: f64) -> f64 {
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    let front = ln_front.exp() / a;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let clamp = |v: f64| if v.abs() < CF_TINY { CF_TINY } else { v };
    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / clamp(1.0 + aa * d);
        c = clamp(1.0 + aa / c);
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / clamp(1.0 + aa * d);
        c = clamp(1.0 + aa / c);
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    front * h
}

/// Binomial coefficients `C(n, 0..=n)` as big integers.
fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

/// Power-basis integer coefficients of
/// `I_x(N+1, N+1) = sum_{k=N+1}^{2N+1} C(2N+1,k) x^k (1-x)^{2N+1-k}`.
pub fn symmetric_beta_poly(n: usize) -> Vec<BigInt> {
    let m = 2 * n + 1;
    let outer = binomial_row(m);
    let mut coeffs = vec![BigInt::zero(); m + 1];
    for k in (n + 1)..=m {
        let inner = binomial_row(m - k);
        for (j, c) in inner.iter().enumerate() {
            let term = &outer[k] * c;
            if j % 2 == 0 {
                coeffs[k + j] += term;
            } else {
                coeffs[k + j] -= term;
            }
        }
    }
    coeffs
}

/// Exact `I_x(N+1, N+1)` for rational `x` in `[0, 1]`.
pub fn symmetric_beta_exact(n: usize, x: &BigRational) -> BigRational {
    if !x.is_positive() {
        return BigRational::zero();
    }
    if *x >= BigRational::one() {
        return BigRational::one();
    }
    let coeffs = symmetric_beta_poly(n);
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}
