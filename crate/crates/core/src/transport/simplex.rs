//! Dense tableau simplex for `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0`,
//! using Bland's rule so degenerate problems terminate.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Primal optimum `x`, dual multipliers `y` (one per constraint) and the
/// objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub objective: T,
}

pub fn maximize<T: Scalar>(c: &[T], a: &[Vec<T>], b: &[T]) -> Result<LpSolution<T>> {
    let nv = c.len();
    let nc = a.len();
    if b.len() != nc || a.iter().any(|r| r.len() != nv) {
        return Err(Error::SizeMismatch("LP dimensions disagree".to_string()));
    }
    if b.iter().any(|v| *v < T::zero()) {
        return Err(Error::BadParameter(
            "LP right-hand side must be nonnegative".to_string(),
        ));
    }
    let width = nv + nc + 1;
    let mut t = vec![T::zero(); (nc + 1) * width];
    for (i, row) in a.iter().enumerate() {
        let r = &mut t[i * width..(i + 1) * width];
        r[..nv].copy_from_slice(row);
        r[nv + i] = T::one();
        r[width - 1] = b[i];
    }
    {
        let z = &mut t[nc * width..];
        for (j, cj) in c.iter().enumerate() {
            z[j] = -*cj;
        }
    }
    let mut basic: Vec<usize> = (nv..nv + nc).collect();
    let eps = T::epsilon() * T::of(1024.0);
    let max_iter = 50 * (nv + nc + 10) * (nv + nc + 10);
    for _ in 0..max_iter {
        let z = &t[nc * width..];
        let Some(enter) = (0..nv + nc).find(|&j| z[j] < -eps) else {
            let mut x = vec![T::zero(); nv];
            for (i, &bv) in basic.iter().enumerate() {
                if bv < nv {
                    x[bv] = t[i * width + width - 1];
                }
            }
            let z = &t[nc * width..];
            let y = (0..nc).map(|i| z[nv + i]).collect();
            return Ok(LpSolution {
                x,
                y,
                objective: z[width - 1],
            });
        };
        let mut leave = None;
        let mut best = T::infinity();
        for i in 0..nc {
            let aij = t[i * width + enter];
            if aij > eps {
                let ratio = t[i * width + width - 1] / aij;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best || (ratio == best && basic[i] < basic[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Err(Error::SolverFailure("LP is unbounded".to_string()));
        };
        let piv = t[r * width + enter];
        for v in &mut t[r * width..(r + 1) * width] {
            *v /= piv;
        }
        let pivot_row: Vec<T> = t[r * width..(r + 1) * width].to_vec();
        for i in 0..=nc {
            if i == r {
                continue;
            }
            let f = t[i * width + enter];
            if f != T::zero() {
                for (v, p) in t[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
                    *v -= f * *p;
                }
            }
        }
        basic[r] = enter;
    }
    Err(Error::SolverFailure("simplex iteration limit".to_string()))
}
