use nalgebra::DMatrix;

use super::covariance::CovarianceEstimate;
use super::wald::{confidence_region, wald_test, ConfidenceRegion, TestResult};
use crate::error::Result;
use crate::index_fit::IfrFit;

/// A linear hypothesis `Bθ = ζ` on the reduced direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub matrix: DMatrix<f64>,
    pub zeta: Vec<f64>,
}

impl Hypothesis {
    /// `θ = 0`, i.e. the direction is the first coordinate axis.
    pub fn all_zero(k: usize) -> Self {
        Hypothesis {
            matrix: DMatrix::identity(k, k),
            zeta: vec![0.0; k],
        }
    }

    /// `θⱼ = 0` for each listed reduced coordinate.
    pub fn coordinates_zero(k: usize, coords: &[usize]) -> Self {
        let mut matrix = DMatrix::zeros(coords.len(), k);
        for (row, &c) in coords.iter().enumerate() {
            matrix[(row, c)] = 1.0;
        }
        Hypothesis {
            matrix,
            zeta: vec![0.0; coords.len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceReport {
    pub covariance: CovarianceEstimate,
    pub test: TestResult,
    /// `None` when `Λ/M` is too close to singular to define an ellipsoid.
    pub region: Option<ConfidenceRegion>,
}

/// Wald test and confidence region for a fit from an already computed
/// covariance estimate.
pub fn inference_report(
    fit: &IfrFit,
    covariance: CovarianceEstimate,
    hypothesis: &Hypothesis,
    alpha: f64,
    gamma: f64,
) -> Result<InferenceReport> {
    let theta = fit.direction.reduced();
    let test = wald_test(
        theta,
        &hypothesis.matrix,
        &hypothesis.zeta,
        &covariance.lambda,
        covariance.bins,
        alpha,
    )?;
    let region = confidence_region(theta, &covariance.lambda, covariance.bins, gamma).ok();
    Ok(InferenceReport {
        covariance,
        test,
        region,
    })
}
