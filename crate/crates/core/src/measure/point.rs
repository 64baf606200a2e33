use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The space a measure lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum SpaceTag {
    /// `{a_0, ..., a_{k-1}}`.
    FiniteAlphabet {
        k: usize,
    },
    RealLine,
    /// `R^d` with the Euclidean norm.
    Euclidean {
        d: usize,
    },
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTag::FiniteAlphabet { k } => write!(f, "finite alphabet of size {k}"),
            SpaceTag::RealLine => write!(f, "real line"),
            SpaceTag::Euclidean { d } => write!(f, "R^{d}"),
        }
    }
}

/// An element of the observation space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point<T> {
    /// Index into a finite alphabet.
    Label(usize),
    Scalar(T),
    Vector(Vec<T>),
}

impl<T: Scalar> Point<T> {
    pub fn as_scalar(&self) -> Option<T> {
        match self {
            Point::Scalar(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_label(&self) -> Option<usize> {
        match self {
            Point::Label(l) => Some(*l),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Point::Label(_) => true,
            Point::Scalar(x) => x.is_finite(),
            Point::Vector(v) => v.iter().all(|x| x.is_finite()),
        }
    }

    /// Whether this point can live in `space`.
    pub fn fits(&self, space: SpaceTag) -> bool {
        match (self, space) {
            (Point::Label(l), SpaceTag::FiniteAlphabet { k }) => *l < k,
            (Point::Scalar(_), SpaceTag::RealLine) => true,
            (Point::Vector(v), SpaceTag::Euclidean { d }) => v.len() == d,
            _ => false,
        }
    }

    /// Euclidean norm for scalars and vectors.
    pub fn norm(&self) -> Result<T> {
        match self {
            Point::Scalar(x) => Ok(x.abs()),
            Point::Vector(v) => Ok(v.iter().map(|x| *x * *x).sum::<T>().sqrt()),
            Point::Label(_) => Err(Error::SpaceMismatch("labels carry no norm".to_string())),
        }
    }

    /// Ground distance: `|x - y|` on the line, Euclidean in `R^d`, discrete
    /// metric on labels.
    pub fn distance(&self, other: &Point<T>) -> Result<T> {
        match (self, other) {
            (Point::Scalar(x), Point::Scalar(y)) => Ok((*x - *y).abs()),
            (Point::Vector(a), Point::Vector(b)) if a.len() == b.len() => {
                Ok(a.iter().zip(b).map(|(x, y)| (*x - *y) * (*x - *y)).sum::<T>().sqrt())
            }
            (Point::Label(a), Point::Label(b)) => Ok(if a == b { T::zero() } else { T::one() }),
            _ => Err(Error::SpaceMismatch(format!(
                "cannot measure distance between {self:?} and {other:?}"
            ))),
        }
    }

    /// Total order used for sorting supports; NaN-free inputs assumed.
    pub(crate) fn order(&self, other: &Point<T>) -> Ordering {
        match (self, other) {
            (Point::Label(a), Point::Label(b)) => a.cmp(b),
            (Point::Scalar(a), Point::Scalar(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
            (Point::Vector(a), Point::Vector(b)) => lex_order(a, b),
            (Point::Label(_), _) => Ordering::Less,
            (_, Point::Label(_)) => Ordering::Greater,
            (Point::Scalar(_), _) => Ordering::Less,
            (_, Point::Scalar(_)) => Ordering::Greater,
        }
    }
}

pub(crate) fn lex_order<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

impl<T: Scalar> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Label(l) => write!(f, "a{l}"),
            Point::Scalar(x) => write!(f, "{x}"),
            Point::Vector(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// An observed sequence `(xi_1, ..., xi_n)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Sample<T> {
    values: Vec<Point<T>>,
}

impl<T: Scalar> Sample<T> {
    pub fn new(values: Vec<Point<T>>) -> Self {
        Self { values }
    }

    pub fn empty() -> Self {
        Self { values: Vec::new() }
    }

    pub fn from_scalars(xs: &[T]) -> Self {
        Self {
            values: xs.iter().map(|&x| Point::Scalar(x)).collect(),
        }
    }

    pub fn from_labels(ls: &[usize]) -> Self {
        Self {
            values: ls.iter().map(|&l| Point::Label(l)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Point<T>] {
        &self.values
    }

    pub fn push(&mut self, p: Point<T>) {
        self.values.push(p);
    }

    pub fn into_values(self) -> Vec<Point<T>> {
        self.values
    }

    /// Scalar values, or `space-mismatch` if any entry is not a scalar.
    pub fn scalars(&self) -> Result<Vec<T>> {
        self.values
            .iter()
            .map(|p| {
                p.as_scalar()
                    .ok_or_else(|| Error::SpaceMismatch(format!("expected scalar observation, got {p}")))
            })
            .collect()
    }

    /// Number of entries equal to `p`.
    pub fn count(&self, p: &Point<T>) -> usize {
        self.values.iter().filter(|q| *q == p).count()
    }
}

impl<T> From<Vec<Point<T>>> for Sample<T> {
    fn from(values: Vec<Point<T>>) -> Self {
        Self { values }
    }
}
