//! Bounded Lipschitz distance
//! `beta(p, q) = sup { sum_i f_i (p_i - q_i) : |f_i| <= 1, |f_i - f_j| <= d(x_i, x_j) }`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::network::solve_transportation;
use super::plan::{CostMatrix, TransportPlan};
use super::simplex::maximize;
use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, Point, SpaceTag};
use crate::scalar::{compensated_sum, Scalar};

/// An admissible test function tabulated on a finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzDual<T> {
    pub support: Vec<Point<T>>,
    pub values: Vec<T>,
}

impl<T: Scalar> LipschitzDual<T> {
    /// Box and pairwise Lipschitz constraints with slack `tol`.
    pub fn is_admissible(&self, tol: T) -> bool {
        if self.values.iter().any(|v| !(v.abs() <= T::one() + tol)) {
            return false;
        }
        for i in 0..self.support.len() {
            for j in (i + 1)..self.support.len() {
                let Ok(d) = self.support[i].distance(&self.support[j]) else {
                    return false;
                };
                if (self.values[i] - self.values[j]).abs() > d + tol {
                    return false;
                }
            }
        }
        true
    }

    /// `int f dp - int f dq` for measures supported inside `self.support`.
    pub fn evaluate(&self, p: &AtomicMeasure<T>, q: &AtomicMeasure<T>) -> T {
        compensated_sum(
            self.support
                .iter()
                .zip(&self.values)
                .map(|(x, f)| *f * (p.mass_at(x) - q.mass_at(x))),
        )
    }
}

/// Sorted union support of `p` and `q` with signed masses `p - q`.
fn signed_union<T: Scalar>(p: &AtomicMeasure<T>, q: &AtomicMeasure<T>) -> Result<(Vec<Point<T>>, Vec<T>)> {
    p.require_space(q)?;
    let mut atoms: Vec<(Point<T>, T)> = p.atoms().chain(q.atoms().map(|(x, w)| (x, -w))).collect();
    atoms.sort_by(|a, b| a.0.order(&b.0));
    let mut pts: Vec<Point<T>> = Vec::with_capacity(atoms.len());
    let mut d: Vec<T> = Vec::with_capacity(atoms.len());
    for (x, w) in atoms {
        if pts.last() == Some(&x) {
            *d.last_mut().unwrap() += w;
        } else {
            pts.push(x);
            d.push(w);
        }
    }
    Ok((pts, d))
}

/// Concave piecewise-linear function on `[-1, 1]`, stored as a start value
/// and a run of `(length, slope)` segments with decreasing slopes.
struct Concave<T> {
    v0: T,
    segs: VecDeque<(T, T)>,
}

impl<T: Scalar> Concave<T> {
    fn zero() -> Self {
        let mut segs = VecDeque::new();
        segs.push_back((T::two(), T::zero()));
        Self { v0: T::zero(), segs }
    }

    fn add_linear(&mut self, d: T) {
        self.v0 -= d;
        for s in &mut self.segs {
            s.1 += d;
        }
    }

    /// Leftmost maximizer, its value, and the index of the first
    /// non-increasing segment.
    fn argmax(&self) -> (T, T, usize) {
        let (mut x, mut v) = (-T::one(), self.v0);
        for (k, &(len, slope)) in self.segs.iter().enumerate() {
            if slope <= T::zero() {
                return (x, v, k);
            }
            x += len;
            v += len * slope;
        }
        (T::one(), v, self.segs.len())
    }

    /// `g -> max { V(y) : |y - g| <= h }`, restricted to `[-1, 1]`.
    fn dilate(&mut self, h: T) {
        if h <= T::zero() {
            return;
        }
        let (_, vmax, k) = self.argmax();
        if h >= T::two() {
            self.v0 = vmax;
            self.segs.clear();
            self.segs.push_back((T::two(), T::zero()));
            return;
        }
        let right = self.segs.split_off(k);
        self.segs.push_back((h + h, T::zero()));
        self.segs.extend(right);
        let mut rem = h;
        while rem > T::zero() {
            let Some(front) = self.segs.front_mut() else { break };
            if front.0 <= rem {
                self.v0 += front.0 * front.1;
                rem -= front.0;
                self.segs.pop_front();
            } else {
                self.v0 += rem * front.1;
                front.0 -= rem;
                rem = T::zero();
            }
        }
        let mut rem = h;
        while rem > T::zero() {
            let Some(back) = self.segs.back_mut() else { break };
            if back.0 <= rem {
                rem -= back.0;
                self.segs.pop_back();
            } else {
                back.0 -= rem;
                rem = T::zero();
            }
        }
        self.coalesce();
    }

    fn coalesce(&mut self) {
        let mut out: VecDeque<(T, T)> = VecDeque::with_capacity(self.segs.len());
        for (len, slope) in self.segs.drain(..) {
            if len <= T::zero() {
                continue;
            }
            match out.back_mut() {
                Some(last) if last.1 == slope => last.0 += len,
                _ => out.push_back((len, slope)),
            }
        }
        if out.is_empty() {
            out.push_back((T::two(), T::zero()));
        }
        self.segs = out;
    }
}

/// Exact 1-D optimum by dynamic programming over the sorted support with
/// only consecutive Lipschitz constraints.
fn bl_line<T: Scalar>(xs: &[T], d: &[T]) -> Vec<T> {
    let m = xs.len();
    let mut vfun = Concave::zero();
    let mut peaks = Vec::with_capacity(m);
    for i in 0..m {
        if i > 0 {
            vfun.dilate(xs[i] - xs[i - 1]);
        }
        vfun.add_linear(d[i]);
        peaks.push(vfun.argmax().0);
    }
    let mut f = vec![T::zero(); m];
    f[m - 1] = peaks[m - 1];
    for i in (0..m - 1).rev() {
        let h = xs[i + 1] - xs[i];
        let lo = (f[i + 1] - h).max(-T::one());
        let hi = (f[i + 1] + h).min(T::one());
        f[i] = peaks[i].max(lo).min(hi);
    }
    f
}

/// `beta(p, q)` with an optimal test function.
///
/// On the real line this is an exact `O(m^2)` dynamic program; elsewhere the
/// dense LP of [`bounded_lipschitz_lp`] is solved.
pub fn bounded_lipschitz<T: Scalar>(p: &AtomicMeasure<T>, q: &AtomicMeasure<T>) -> Result<(T, LipschitzDual<T>)> {
    if p.space() != SpaceTag::RealLine {
        return bounded_lipschitz_lp(p, q);
    }
    let (pts, d) = signed_union(p, q)?;
    let xs: Vec<T> = pts.iter().map(|x| x.as_scalar().unwrap()).collect();
    let values = bl_line(&xs, &d);
    let value = compensated_sum(values.iter().zip(&d).map(|(f, w)| *f * *w)).max(T::zero());
    Ok((value, LipschitzDual { support: pts, values }))
}

/// `beta(p, q)` by the dense simplex over the union support, shifted to
/// `g = f + 1` in `[0, 2]` so the origin is feasible.
///
/// On the line only consecutive constraints are imposed; otherwise every pair
/// closer than 2 (farther pairs are implied by the box).
pub fn bounded_lipschitz_lp<T: Scalar>(p: &AtomicMeasure<T>, q: &AtomicMeasure<T>) -> Result<(T, LipschitzDual<T>)> {
    let (pts, d) = signed_union(p, q)?;
    let m = pts.len();
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut rhs: Vec<T> = Vec::new();
    for i in 0..m {
        let mut r = vec![T::zero(); m];
        r[i] = T::one();
        rows.push(r);
        rhs.push(T::two());
    }
    let mut pair = |i: usize, j: usize, dist: T| {
        for (a, b) in [(i, j), (j, i)] {
            let mut r = vec![T::zero(); m];
            r[a] = T::one();
            r[b] = -T::one();
            rows.push(r);
            rhs.push(dist);
        }
    };
    if p.space() == SpaceTag::RealLine {
        for i in 1..m {
            pair(i - 1, i, pts[i].distance(&pts[i - 1])?);
        }
    } else {
        for i in 0..m {
            for j in (i + 1)..m {
                let dist = pts[i].distance(&pts[j])?;
                if dist < T::two() {
                    pair(i, j, dist);
                }
            }
        }
    }
    let sol = maximize(&d, &rows, &rhs)?;
    let values: Vec<T> = sol.x.iter().map(|g| *g - T::one()).collect();
    let value = compensated_sum(values.iter().zip(&d).map(|(f, w)| *f * *w)).max(T::zero());
    Ok((value, LipschitzDual { support: pts, values }))
}

/// Optimal transport plan for the truncated ground cost `min(d(x, y), 2)`.
/// Its cost equals `beta(p, q)`, so it certifies any admissible test function
/// from above.
pub fn bounded_lipschitz_certificate<T: Scalar>(
    p: &AtomicMeasure<T>,
    q: &AtomicMeasure<T>,
) -> Result<TransportPlan<T>> {
    p.require_space(q)?;
    let cost = CostMatrix::from_fn(p.len(), q.len(), |i, j| {
        Ok(p.point(i).distance(&q.point(j))?.min(T::two()))
    })?;
    solve_transportation(&cost, p.weights(), q.weights()).map_err(|e| match e {
        Error::BadMarginals(s) => Error::InvalidMeasure(s),
        other => other,
    })
}
