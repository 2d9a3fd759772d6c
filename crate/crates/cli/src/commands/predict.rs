use std::path::Path;

use ifreg::index_fit::predict;
use ifreg::simulation::rmpe;
use ifreg::ObjectValue;

use super::{load_sample, rehydrate, response_format};
use crate::config::RunConfig;
use crate::dataset::{read_predictors, read_responses, write_responses};
use crate::error::{CliError, CliResult};
use crate::output::sig6;
use crate::payload::{self, FitPayload};
use crate::DataArgs;

pub fn run(
    config: &RunConfig,
    fit_path: &Path,
    data: &DataArgs,
    new_predictors: &Path,
    truth: Option<&Path>,
    out: Option<&Path>,
) -> CliResult<()> {
    let result: FitPayload = payload::read(fit_path, "fit")?;
    let kind = result.metric.parse()?;
    let sample = load_sample(config, kind, data)?;
    let fit = rehydrate(&result, &sample, fit_path)?;
    let x_new = read_predictors(new_predictors)?;
    if x_new.ncols() != sample.p() {
        return Err(CliError::Input(format!(
            "{} has {} columns, the fit has p = {}",
            new_predictors.display(),
            x_new.ncols(),
            sample.p()
        )));
    }
    let predictions = predict(&fit, &sample, &x_new)?;
    for (i, p) in predictions.iter().enumerate() {
        if p.extrapolated {
            eprintln!(
                "warning: row {}: projection {} lies outside the training range",
                i + 1,
                sig6(p.projection)
            );
        }
    }
    let objects: Vec<ObjectValue> = predictions.into_iter().map(|p| p.object).collect();
    println!("predicted {} rows", objects.len());
    if let Some(path) = truth {
        let observed = read_responses(path, response_format(config, kind))?;
        if observed.len() != objects.len() {
            return Err(CliError::Input(format!(
                "{} has {} responses for {} new rows",
                path.display(),
                observed.len(),
                objects.len()
            )));
        }
        println!("RMPE = {}", sig6(rmpe(&objects, &observed, kind)?));
    }
    if let Some(path) = out {
        write_responses(path, &objects)?;
    }
    Ok(())
}
