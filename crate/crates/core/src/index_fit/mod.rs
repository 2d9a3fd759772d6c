//! Direction estimation for the single index model.

mod baseline;
mod bins;
mod criterion;
mod direction;
mod fit;
mod predict;

pub use baseline::{gfr_fit, lfr_fit};
pub use bins::{bin_projections, make_bins, BinLoss, BinnedSample};
pub use criterion::{criterion_vn, cv_bins, cv_bins_scores, evaluate_direction, group_losses, DirectionEval};
pub use direction::{sample_directions, DirectionParam};
pub use fit::{default_bin_grid, fit_ifr, fit_ifr_on, FitConfig, IfrFit, SearchEntry, SearchLog, SearchStage, Tuning};
pub use predict::{predict, Prediction};
