use nalgebra::{DMatrix, DVector};

use crate::error::{IfrError, Result};
use crate::linalg::{checked_inverse, condition_number, mean_and_covariance};
use crate::local_frechet::{llfr_fit_at, KernelSpec};
use crate::metric_spaces::{weighted_frechet_mean, ObjectValue};
use crate::sample::Sample;

const MAX_CONDITION: f64 = 1e12;

/// Global Fréchet regression: the weighted Fréchet mean with weights
/// `sᵢ(x)/n`, `sᵢ(x) = 1 + (Xᵢ − X̄)ᵀΣ̂⁻¹(x − X̄)`, at each query row.
pub fn gfr_fit(sample: &Sample, new_predictors: &DMatrix<f64>) -> Result<Vec<ObjectValue>> {
    let x = sample.predictors();
    if new_predictors.ncols() != x.ncols() {
        return Err(IfrError::Dimension(format!(
            "query has {} columns, sample has {}",
            new_predictors.ncols(),
            x.ncols()
        )));
    }
    let (mean, cov) = mean_and_covariance(x);
    let inv = checked_inverse(&cov, MAX_CONDITION).map_err(|_| IfrError::SingularDesign {
        condition: condition_number(&cov),
    })?;
    let n = sample.n();
    let centered: Vec<DVector<f64>> = (0..n).map(|i| x.row(i).transpose() - &mean).collect();
    (0..new_predictors.nrows())
        .map(|q| {
            let dx = new_predictors.row(q).transpose() - &mean;
            let a = &inv * dx;
            let w: Vec<f64> = centered.iter().map(|c| (1.0 + c.dot(&a)) / n as f64).collect();
            let total: f64 = w.iter().sum();
            let w: Vec<f64> = w.iter().map(|v| v / total).collect();
            weighted_frechet_mean(sample.responses(), &w, sample.kind())
        })
        .collect()
}

/// Local linear Fréchet regression on the single predictor `coordinate`.
pub fn lfr_fit(
    sample: &Sample,
    coordinate: usize,
    kernel: &KernelSpec,
    new_predictors: &DMatrix<f64>,
) -> Result<Vec<ObjectValue>> {
    if coordinate >= sample.p() || new_predictors.ncols() != sample.p() {
        return Err(IfrError::Dimension(format!(
            "coordinate {coordinate} unavailable for p = {}",
            sample.p()
        )));
    }
    let t: Vec<f64> = sample.predictors().column(coordinate).iter().copied().collect();
    new_predictors
        .column(coordinate)
        .iter()
        .map(|&x| llfr_fit_at(sample.responses(), &t, x, kernel, sample.kind()))
        .collect()
}
