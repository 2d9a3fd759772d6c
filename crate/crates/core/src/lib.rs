//! Single index Fréchet regression.
//!
//! Responses live in a metric space (distributions under the Wasserstein-2
//! metric, symmetric matrices under Frobenius, points on a sphere, or plain
//! vectors); predictors are Euclidean and act through one projection `xᵀθ̄`.
//! The crate estimates the direction `θ̄`, fits the object-valued link by
//! local linear Fréchet regression, and provides Wald-type inference.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod index_fit;
pub mod inference;
pub mod linalg;
pub mod local_frechet;
pub mod metric_spaces;
pub mod rng;
pub mod sample;
pub mod simulation;

pub use error::{IfrError, Result};
pub use metric_spaces::{
    distance, weighted_frechet_mean, EuclideanVec, MatrixConstraint, MetricSpaceKind, ObjectValue, ProbGrid,
    QuantileFunction, SpherePoint, SymMatrix,
};
