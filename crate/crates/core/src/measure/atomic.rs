use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::point::{lex_order, Point, Sample, SpaceTag};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Support points of an atomic measure, stored by variant so that all atoms
/// of one measure share the same kind of point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support<T> {
    Labels(Vec<usize>),
    Scalars(Vec<T>),
    /// Row-major coordinates, `dim` per atom.
    Vectors {
        dim: usize,
        coords: Vec<T>,
    },
}

impl<T: Scalar> Support<T> {
    fn point(&self, i: usize) -> Point<T> {
        match self {
            Support::Labels(v) => Point::Label(v[i]),
            Support::Scalars(v) => Point::Scalar(v[i]),
            Support::Vectors { dim, coords } => Point::Vector(coords[i * dim..(i + 1) * dim].to_vec()),
        }
    }
}

/// A finite-support probability measure.
///
/// Atoms are kept sorted by point, duplicate points are merged by adding their
/// weights, zero-weight atoms are dropped and the weights sum to one.
/// Real coordinates are merged only on exact equality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure<T> {
    space: SpaceTag,
    support: Support<T>,
    weights: Vec<T>,
}

fn input_mass_tol<T: Scalar>() -> f64 {
    T::MASS_TOL * 1e3
}

impl<T: Scalar> AtomicMeasure<T> {
    /// Builds a measure from atoms whose weights already sum to one (up to
    /// rounding); the weights are then rescaled to sum to one.
    pub fn new(space: SpaceTag, atoms: Vec<(Point<T>, T)>) -> Result<Self> {
        let total = check_atoms(space, &atoms)?;
        if (total - 1.0).abs() > input_mass_tol::<T>() {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self::assemble(space, atoms, T::of(total)))
    }

    /// Builds a measure from nonnegative atoms with positive total mass,
    /// dividing by the total.
    pub fn normalized(space: SpaceTag, atoms: Vec<(Point<T>, T)>) -> Result<Self> {
        let total = check_atoms(space, &atoms)?;
        if !(total > 0.0) {
            return Err(Error::InvalidMeasure("total mass is zero".to_string()));
        }
        Ok(Self::assemble(space, atoms, T::of(total)))
    }

    pub fn dirac(space: SpaceTag, p: Point<T>) -> Result<Self> {
        Self::new(space, vec![(p, T::one())])
    }

    /// Uniform weights on `xs` (duplicates merge).
    pub fn uniform_scalars(xs: &[T]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::EmptySample);
        }
        let w = T::one() / T::of_usize(xs.len());
        Self::normalized(SpaceTag::RealLine, xs.iter().map(|&x| (Point::Scalar(x), w)).collect())
    }

    /// Weighted scalar atoms.
    pub fn scalar(points: &[T], weights: &[T]) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::SizeMismatch(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        Self::new(
            SpaceTag::RealLine,
            points
                .iter()
                .zip(weights)
                .map(|(&x, &w)| (Point::Scalar(x), w))
                .collect(),
        )
    }

    /// Weight vector over the alphabet `{0, ..., k-1}`.
    pub fn finite(weights: &[T]) -> Result<Self> {
        Self::new(
            SpaceTag::FiniteAlphabet { k: weights.len() },
            weights.iter().enumerate().map(|(l, &w)| (Point::Label(l), w)).collect(),
        )
    }

    fn assemble(space: SpaceTag, mut atoms: Vec<(Point<T>, T)>, total: T) -> Self {
        atoms.sort_by(|a, b| a.0.order(&b.0));
        let mut merged: Vec<(Point<T>, T)> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            match merged.last_mut() {
                Some((q, acc)) if *q == p => *acc += w,
                _ => merged.push((p, w)),
            }
        }
        merged.retain(|(_, w)| *w > T::zero());
        let mut weights: Vec<T> = merged.iter().map(|(_, w)| *w / total).collect();
        // absorb the rounding residue into the heaviest atom
        let resid = T::one() - compensated_sum(weights.iter().copied());
        if let Some(imax) =
            (0..weights.len()).max_by(|&i, &j| weights[i].partial_cmp(&weights[j]).unwrap_or(Ordering::Equal))
        {
            weights[imax] += resid;
        }
        let support = match space {
            SpaceTag::FiniteAlphabet { .. } => {
                Support::Labels(merged.iter().map(|(p, _)| p.as_label().unwrap()).collect())
            }
            SpaceTag::RealLine => Support::Scalars(merged.iter().map(|(p, _)| p.as_scalar().unwrap()).collect()),
            SpaceTag::Euclidean { d } => {
                let mut coords = Vec::with_capacity(d * merged.len());
                for (p, _) in &merged {
                    if let Point::Vector(v) = p {
                        coords.extend_from_slice(v);
                    }
                }
                Support::Vectors { dim: d, coords }
            }
        };
        Self {
            space,
            support,
            weights,
        }
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn support(&self) -> &Support<T> {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> Point<T> {
        self.support.point(i)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (Point<T>, T)> + '_ {
        (0..self.len()).map(move |i| (self.support.point(i), self.weights[i]))
    }

    /// Sorted scalar support, if the measure lives on the real line.
    pub fn scalar_points(&self) -> Option<&[T]> {
        match &self.support {
            Support::Scalars(v) => Some(v),
            _ => None,
        }
    }

    pub fn label_points(&self) -> Option<&[usize]> {
        match &self.support {
            Support::Labels(v) => Some(v),
            _ => None,
        }
    }

    /// Dense weight vector over a finite alphabet (absent labels get 0).
    pub fn label_weights(&self) -> Result<Vec<T>> {
        match (&self.support, self.space) {
            (Support::Labels(ls), SpaceTag::FiniteAlphabet { k }) => {
                let mut out = vec![T::zero(); k];
                for (l, w) in ls.iter().zip(&self.weights) {
                    out[*l] = *w;
                }
                Ok(out)
            }
            _ => Err(Error::SpaceMismatch(format!(
                "expected a finite alphabet, got {}",
                self.space
            ))),
        }
    }

    pub fn weight_sum(&self) -> T {
        compensated_sum(self.weights.iter().copied())
    }

    /// Mass of the atom at `p` (0 if absent).
    pub fn mass_at(&self, p: &Point<T>) -> T {
        let idx = match (&self.support, p) {
            (Support::Labels(v), Point::Label(l)) => v.binary_search(l).ok(),
            (Support::Scalars(v), Point::Scalar(x)) => {
                v.binary_search_by(|y| y.partial_cmp(x).unwrap_or(Ordering::Equal)).ok()
            }
            (Support::Vectors { dim, coords }, Point::Vector(x)) if x.len() == *dim => {
                let n = self.len();
                let (mut lo, mut hi) = (0usize, n);
                let mut found = None;
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    match lex_order(&coords[mid * dim..(mid + 1) * dim], x) {
                        Ordering::Less => lo = mid + 1,
                        Ordering::Greater => hi = mid,
                        Ordering::Equal => {
                            found = Some(mid);
                            break;
                        }
                    }
                }
                found
            }
            _ => None,
        };
        idx.map(|i| self.weights[i]).unwrap_or_else(T::zero)
    }

    pub(crate) fn require_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(format!("{} vs {}", self.space, other.space)));
        }
        Ok(())
    }
}

fn check_atoms<T: Scalar>(space: SpaceTag, atoms: &[(Point<T>, T)]) -> Result<f64> {
    if atoms.is_empty() {
        return Err(Error::InvalidMeasure("no atoms".to_string()));
    }
    let mut total = 0.0f64;
    for (p, w) in atoms {
        if !p.fits(space) {
            return Err(Error::SpaceMismatch(format!("point {p} does not belong to {space}")));
        }
        if !p.is_finite() {
            return Err(Error::InvalidMeasure(format!("non-finite point {p}")));
        }
        if !(w.is_finite() && *w >= T::zero()) {
            return Err(Error::InvalidMeasure(format!("invalid weight {w} at {p}")));
        }
        total += w.to_f64_lossy();
    }
    Ok(total)
}

/// `e_n = (1/n) sum_i delta_{xi_i}`.
pub fn empirical<T: Scalar>(sample: &Sample<T>) -> Result<AtomicMeasure<T>> {
    let values = sample.values();
    let first = values.first().ok_or(Error::EmptySample)?;
    let space = match first {
        Point::Scalar(_) => SpaceTag::RealLine,
        Point::Vector(v) => SpaceTag::Euclidean { d: v.len() },
        Point::Label(_) => {
            let k = values
                .iter()
                .map(|p| p.as_label().map(|l| l + 1).unwrap_or(0))
                .max()
                .unwrap_or(1);
            SpaceTag::FiniteAlphabet { k }
        }
    };
    empirical_in(sample, space)
}

/// Empirical measure placed in an explicit space (used when the alphabet size
/// is known from the model rather than from the observed labels).
pub fn empirical_in<T: Scalar>(sample: &Sample<T>, space: SpaceTag) -> Result<AtomicMeasure<T>> {
    let values = sample.values();
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    // counting in integers keeps the weights exact multiples of 1/n
    let mut sorted: Vec<&Point<T>> = values.iter().collect();
    sorted.sort_by(|a, b| a.order(b));
    let n = values.len();
    let inv = T::one() / T::of_usize(n);
    let mut atoms: Vec<(Point<T>, T)> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && sorted[j] == sorted[i] {
            j += 1;
        }
        atoms.push((sorted[i].clone(), T::of_usize(j - i) * inv));
        i = j;
    }
    AtomicMeasure::new(space, atoms)
}

/// `w * first + (1 - w) * second`.
pub fn mixture<T: Scalar>(first: &AtomicMeasure<T>, second: &AtomicMeasure<T>, w: T) -> Result<AtomicMeasure<T>> {
    first.require_space(second)?;
    if !(w >= T::zero() && w <= T::one()) {
        return Err(Error::BadParameter(format!("mixture weight {w} outside [0, 1]")));
    }
    let v = T::one() - w;
    let atoms = first
        .atoms()
        .map(|(p, a)| (p, a * w))
        .chain(second.atoms().map(|(p, b)| (p, b * v)))
        .collect();
    AtomicMeasure::new(first.space(), atoms)
}

/// `sum_i w_i f(x_i)`.
pub fn integrate<T: Scalar, F>(measure: &AtomicMeasure<T>, f: F) -> Result<T>
where
    F: Fn(&Point<T>) -> T,
{
    let mut terms = Vec::with_capacity(measure.len());
    for (p, w) in measure.atoms() {
        let v = f(&p);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand(p.to_string()));
        }
        terms.push(w * v);
    }
    Ok(compensated_sum(terms))
}

/// Scalar-only fast path of [`integrate`].
pub fn integrate_scalar<T: Scalar, F>(measure: &AtomicMeasure<T>, f: F) -> Result<T>
where
    F: Fn(T) -> T,
{
    let xs = measure
        .scalar_points()
        .ok_or_else(|| Error::SpaceMismatch(format!("expected real line, got {}", measure.space())))?;
    let mut terms = Vec::with_capacity(xs.len());
    for (&x, &w) in xs.iter().zip(measure.weights()) {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand(x.to_string()));
        }
        terms.push(w * v);
    }
    Ok(compensated_sum(terms))
}
