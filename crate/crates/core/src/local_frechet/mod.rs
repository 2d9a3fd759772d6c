//! Kernel smoothing of object-valued responses over a scalar index.

mod fit;
mod kernel;
mod smoother;
mod weights;

pub(crate) use fit::{argmin_smallest, projection_range};
pub use fit::{cv_bandwidth, cv_bandwidth_scores, default_bandwidth_grid, default_folds, llfr_fit_at, llfr_fit_subset};
pub use kernel::{KernelFamily, KernelSpec};
pub use smoother::Smoother;
pub use weights::{empirical_weights, LocalWeights};
