use nalgebra::DMatrix;

use super::fit::IfrFit;
use crate::error::{IfrError, Result};
use crate::local_frechet::{llfr_fit_at, KernelSpec};
use crate::metric_spaces::ObjectValue;
use crate::sample::{project_rows, Sample};

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub object: ObjectValue,
    pub projection: f64,
    /// The projection lies farther than one bandwidth outside the training
    /// projections' range.
    pub extrapolated: bool,
}

/// `m̂(xᵀθ̂, θ̂)` at each row of `new_predictors`, smoothing the training
/// sample with the fitted bandwidth.
pub fn predict(fit: &IfrFit, training: &Sample, new_predictors: &DMatrix<f64>) -> Result<Vec<Prediction>> {
    if new_predictors.ncols() != training.p() {
        return Err(IfrError::Dimension(format!(
            "new predictors have {} columns, the fit used {}",
            new_predictors.ncols(),
            training.p()
        )));
    }
    let kernel = KernelSpec::new(fit.kernel, fit.bandwidth)?;
    let train_proj = training.project(fit.direction.full())?;
    let lo = train_proj.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = train_proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    project_rows(new_predictors, fit.direction.full())?
        .into_iter()
        .map(|t| {
            let object = llfr_fit_at(training.responses(), &train_proj, t, &kernel, training.kind())?;
            let extrapolated = t < lo - fit.bandwidth || t > hi + fit.bandwidth;
            Ok(Prediction {
                object,
                projection: t,
                extrapolated,
            })
        })
        .collect()
}
