//! Covariance estimation, Wald tests, confidence regions and power for the
//! estimated direction.

mod chi_square;
mod covariance;
mod finite_diff;
mod report;
mod wald;

pub use chi_square::{chi2_cdf, chi2_quantile, chi2_sf, noncentral_chi2_sf};
pub use covariance::{
    bootstrap_lambda, bootstrap_lambda_with, lambda_plugin, plugin_covariance, BootstrapOutcome, CovarianceEstimate,
    CovarianceSource,
};
pub use finite_diff::{fit_losses, grad_vn, hess_vn, sigma_hat, FiniteDiffConfig};
pub use report::{inference_report, Hypothesis, InferenceReport};
pub use wald::{confidence_region, power_at, wald_test, ConfidenceRegion, TestResult};
