pub mod fit;
pub mod plotdata;
pub mod predict;
pub mod simulate;

use std::path::Path;

use ifreg::index_fit::{fit_ifr_on, DirectionParam, FitConfig, IfrFit, Tuning};
use ifreg::sample::Sample;
use ifreg::MetricSpaceKind;

use crate::config::RunConfig;
use crate::dataset::{read_predictors, read_responses, ResponseFormat};
use crate::error::{CliError, CliResult};
use crate::payload::FitPayload;
use crate::DataArgs;

pub fn response_format(config: &RunConfig, kind: MetricSpaceKind) -> ResponseFormat {
    ResponseFormat {
        kind,
        constraint: config.matrix_constraint,
        sqrt_transform: config.sqrt_transform,
    }
}

pub fn load_sample(config: &RunConfig, kind: MetricSpaceKind, data: &DataArgs) -> CliResult<Sample> {
    let x = read_predictors(&data.predictors)?;
    let y = read_responses(&data.responses, response_format(config, kind))?;
    if x.nrows() != y.len() {
        return Err(CliError::Input(format!(
            "{} has {} rows but {} has {} responses",
            data.predictors.display(),
            x.nrows(),
            data.responses.display(),
            y.len()
        )));
    }
    Ok(Sample::new(x, y, kind)?)
}

/// Rebuilds the fit described by a result file on its training data.
pub fn rehydrate(payload: &FitPayload, sample: &Sample, source: &Path) -> CliResult<IfrFit> {
    if payload.n != sample.n() || payload.p != sample.p() {
        return Err(CliError::Input(format!(
            "{} was fitted on n = {}, p = {} but the data have n = {}, p = {}",
            source.display(),
            payload.n,
            payload.p,
            sample.n(),
            sample.p()
        )));
    }
    let direction = DirectionParam::from_full(payload.theta.clone())?;
    let config = FitConfig {
        n_directions: 1,
        bandwidths: None,
        bins: None,
        kernel: payload.kernel.parse()?,
        tuning: Tuning::Fixed {
            bandwidth: payload.bandwidth,
            bins: payload.bins,
        },
        bin_loss: payload.bin_loss.parse()?,
        refine: false,
        seed: payload.seed,
    };
    let fit = fit_ifr_on(sample, &[direction], &config)?;
    let tolerance = 1e-9 * (1.0 + payload.criterion.abs());
    if (fit.criterion - payload.criterion).abs() > tolerance {
        return Err(CliError::Input(format!(
            "{} does not match these data (criterion {} vs {})",
            source.display(),
            fit.criterion,
            payload.criterion
        )));
    }
    Ok(fit)
}

/// The fit-time configuration stored in a result, with the current run's
/// search settings for anything the result does not record.
pub fn payload_fit_config(payload: &FitPayload, config: &RunConfig) -> CliResult<FitConfig> {
    Ok(FitConfig {
        n_directions: payload.directions,
        kernel: payload.kernel.parse()?,
        bin_loss: payload.bin_loss.parse()?,
        seed: payload.seed,
        ..config.fit_config()
    })
}
