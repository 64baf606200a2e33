use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, SpaceTag};
use crate::scalar::{compensated_sum, Scalar};

fn scalar_support<T: Scalar>(p: &AtomicMeasure<T>) -> Result<&[T]> {
    p.scalar_points()
        .ok_or_else(|| Error::SpaceMismatch(format!("expected real line, got {}", p.space())))
}

/// `w1(p, q) = int |F_p - F_q| dx`, exact over the merged threshold grid.
pub fn w1_real<T: Scalar>(p: &AtomicMeasure<T>, q: &AtomicMeasure<T>) -> Result<T> {
    let (xs, ws) = (scalar_support(p)?, p.weights());
    let (ys, vs) = (scalar_support(q)?, q.weights());
    let (mut i, mut j) = (0usize, 0usize);
    let (mut fp, mut fq) = (T::zero(), T::zero());
    let mut prev: Option<T> = None;
    let mut terms = Vec::with_capacity(xs.len() + ys.len());
    while i < xs.len() || j < ys.len() {
        let t = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        if let Some(s) = prev {
            terms.push((fp - fq).abs() * (t - s));
        }
        while i < xs.len() && xs[i] == t {
            fp += ws[i];
            i += 1;
        }
        while j < ys.len() && ys[j] == t {
            fq += vs[j];
            j += 1;
        }
        prev = Some(t);
    }
    Ok(compensated_sum(terms))
}

/// Plug-in `w1` between two equal-size scalar samples: the mean absolute
/// difference of matched order statistics.
pub fn w1_scalar_samples<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() {
        return Err(Error::SizeMismatch(format!("{} vs {} values", xs.len(), ys.len())));
    }
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    if xs.iter().chain(ys).any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteIntegrand("sample value".to_string()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let s = compensated_sum(a.iter().zip(&b).map(|(x, y)| (*x - *y).abs()));
    Ok(s / T::of_usize(a.len()))
}

/// `(1/2) sum_i |p(a_i) - q(a_i)|` on a finite alphabet.
pub fn tv_finite<T: Scalar>(p: &AtomicMeasure<T>, q: &AtomicMeasure<T>) -> Result<T> {
    match (p.space(), q.space()) {
        (SpaceTag::FiniteAlphabet { k: a }, SpaceTag::FiniteAlphabet { k: b }) if a == b => {}
        (s, t) => {
            return Err(Error::SpaceMismatch(format!(
                "total variation needs one finite alphabet, got {s} and {t}"
            )))
        }
    }
    let (lp, lq) = (p.label_points().unwrap(), q.label_points().unwrap());
    let (wp, wq) = (p.weights(), q.weights());
    let (mut i, mut j) = (0, 0);
    let mut terms = Vec::with_capacity(lp.len() + lq.len());
    while i < lp.len() || j < lq.len() {
        let a = lp.get(i).copied().unwrap_or(usize::MAX);
        let b = lq.get(j).copied().unwrap_or(usize::MAX);
        if a == b {
            terms.push((wp[i] - wq[j]).abs());
            i += 1;
            j += 1;
        } else if a < b {
            terms.push(wp[i]);
            i += 1;
        } else {
            terms.push(wq[j]);
            j += 1;
        }
    }
    let s = compensated_sum(terms) / T::two();
    Ok(s.min(T::one()))
}
