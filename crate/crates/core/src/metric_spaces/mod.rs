//! Response object spaces: representations, metrics, weighted Fréchet means
//! and projections.

mod distance;
mod fiedler;
mod mean;
mod object;
mod project;

pub(crate) use distance::dist_sq;
pub use distance::{distance, distance_sq, geodesic_angle};
pub use fiedler::{fiedler_value, fiedler_value_dense};
pub use mean::{frechet_mean_of, weighted_frechet_mean};
pub use object::{
    EuclideanVec, MatrixConstraint, MetricSpaceKind, ObjectValue, ProbGrid, QuantileFunction, SpherePoint, SymMatrix,
    EIGEN_TOL, MONOTONE_TOL, SYMMETRY_TOL, UNIT_NORM_TOL,
};
pub use project::{isotonic_projection, project_to_space, ObjectShape};
