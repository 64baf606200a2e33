use serde::{Deserialize, Serialize};

use crate::rng::RngState;

/// Bookkeeping of one truncated stick-breaking draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Number of broken sticks, excluding the residual atom.
    pub sticks: usize,
    /// Unbroken mass handed to the residual atom.
    pub residual: f64,
    /// Whether the stick budget, rather than the tolerance, ended the draw.
    pub hit_max_sticks: bool,
}

/// Breaks sticks `V_1, V_2, ...` (from `next_v`, `None` meaning the last
/// stick takes everything) until the unbroken mass drops below
/// `residual_tol` or `max_sticks` are used, then gives the remainder to one
/// extra location.
pub(crate) fn break_sticks<V, Z>(
    mut next_v: V,
    mut location: Z,
    max_sticks: usize,
    residual_tol: f64,
    rng: &mut RngState,
) -> (Vec<(f64, f64)>, Truncation)
where
    V: FnMut(usize, &mut RngState) -> Option<f64>,
    Z: FnMut(&mut RngState) -> f64,
{
    let mut atoms = Vec::new();
    let mut rest = 1.0f64;
    let mut k = 0usize;
    let mut hit_max = false;
    while rest >= residual_tol {
        if k == max_sticks {
            hit_max = true;
            break;
        }
        let Some(v) = next_v(k, rng) else { break };
        let w = rest * v;
        rest -= w;
        atoms.push((location(rng), w));
        k += 1;
    }
    let residual = rest;
    if rest > 0.0 {
        atoms.push((location(rng), rest));
    }
    (
        atoms,
        Truncation {
            sticks: k,
            residual,
            hit_max_sticks: hit_max,
        },
    )
}
