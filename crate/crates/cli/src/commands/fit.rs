use std::path::Path;

use ifreg::index_fit::fit_ifr;

use super::load_sample;
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{join_sig6, sig6};
use crate::payload::{self, FitPayload};
use crate::DataArgs;

pub fn run(config: &RunConfig, data: &DataArgs, out: Option<&Path>) -> CliResult<()> {
    let kind = config.metric()?;
    let sample = load_sample(config, kind, data)?;
    let fit = fit_ifr(&sample, &config.fit_config())?;
    let result = FitPayload::from_fit(
        &fit,
        kind,
        config.tuning.to_string(),
        config.seed,
        config.directions,
        sample.n(),
    );

    println!(
        "fitted n = {}, p = {} under the {} metric",
        sample.n(),
        sample.p(),
        kind.name()
    );
    println!("theta      = [{}]", join_sig6(&result.theta));
    println!("bandwidth  = {}", sig6(result.bandwidth));
    println!("bins       = {} ({} non-empty)", result.bins, result.effective_bins);
    println!("criterion  = {}", sig6(result.criterion));
    println!(
        "search     = {} directions ({} refine, {} failed)",
        result.search.evaluated, result.search.refine, result.search.failed
    );
    if result.search.zero_variance {
        eprintln!("warning: every direction gave a zero criterion; the direction is not identified");
    }
    if let Some(path) = out {
        payload::write(path, &result)?;
    }
    Ok(())
}
