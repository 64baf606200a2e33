//! Finitary posterior analysis for exchangeable sequences.
//!
//! Given the first `n` observations of an exchangeable sequence, this crate
//! samples the conditional law of the empirical measure `e_N` of the first
//! `N` observations and the posterior law of the directing measure, measures
//! the distance between them with exact optimal transport, and compares it
//! with closed-form bounds. It also computes finitary Bayes estimators of
//! mean, variance, distribution function and Gini mean difference.
//!
//! Measures, transport and bounds are generic over [`Scalar`] (`f32`, `f64`).
//! Priors, estimators and the harness draw from `rand_distr` samplers and
//! work in `f64`.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod measure;
pub mod priors;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod transport;

pub use error::{Error, Result};
pub use measure::{AnalyticFamily, AtomicMeasure, Cdf, Point, Sample, SpaceTag, StepCdf};
pub use priors::{Estimate, ExchangeableModel};
pub use rng::{derive_seed, mix_seed, RngState};
pub use scalar::Scalar;
pub use transport::{CostMatrix, Ground, MetaW1, TransportPlan};

pub type AtomicMeasureF64 = AtomicMeasure<f64>;
pub type AtomicMeasureF32 = AtomicMeasure<f32>;
pub type SampleF64 = Sample<f64>;
pub type SampleF32 = Sample<f32>;
pub type PointF64 = Point<f64>;
pub type CdfF64 = Cdf<f64>;
pub type CostMatrixF64 = CostMatrix<f64>;
pub type CostMatrixF32 = CostMatrix<f32>;
pub type TransportPlanF64 = TransportPlan<f64>;
pub type MetaW1F64 = MetaW1<f64>;
