//! Adaptive Gauss-Kronrod quadrature (7/15 points).

use crate::measure::AnalyticFamily;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// `int_a^b f(x) dx` with absolute error target `tol`.
///
/// Returns the estimate and the accumulated error estimate.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let (v0, e0) = gk15(&f, a, b);
    let mut done_val = 0.0;
    let mut done_err = 0.0;
    let mut stack = vec![(a, b, v0, e0, tol)];
    let mut intervals = 1usize;
    while let Some((lo, hi, v, e, t)) = stack.pop() {
        let width_floor = (hi - lo).abs() <= 1e-14 * (1.0 + lo.abs().max(hi.abs()));
        if e <= t || width_floor || intervals >= MAX_INTERVALS {
            done_val += v;
            done_err += e;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (vl, el) = gk15(&f, lo, mid);
        let (vr, er) = gk15(&f, mid, hi);
        intervals += 1;
        stack.push((lo, mid, vl, el, 0.5 * t));
        stack.push((mid, hi, vr, er, 0.5 * t));
    }
    (done_val, done_err)
}

/// `E[f(X)]` for `X` distributed according to `family`.
pub fn expect_under<F: Fn(f64) -> f64>(family: &AnalyticFamily, f: F, tol: f64) -> f64 {
    match *family {
        AnalyticFamily::PointMass { c } => f(c),
        AnalyticFamily::Uniform { a, b } => {
            let w = 1.0 / (b - a);
            integrate_adaptive(|x| f(x) * w, a, b, tol).0
        }
        AnalyticFamily::Gaussian { mu, sigma } => {
            let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
            let g = |x: f64| {
                let z = (x - mu) / sigma;
                f(x) * norm * (-0.5 * z * z).exp()
            };
            // split at the mode so the peak is resolved on both halves
            let span = 16.0 * sigma;
            integrate_adaptive(g, mu - span, mu, 0.5 * tol).0 + integrate_adaptive(g, mu, mu + span, 0.5 * tol).0
        }
    }
}
