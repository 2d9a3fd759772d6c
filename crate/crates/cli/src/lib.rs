//! Command-line front end for single index Fréchet regression.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod output;
pub mod payload;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "ifreg",
    version,
    about = "Single index Fréchet regression for metric-space responses"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command; they override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// wasserstein, frobenius, sphere or euclidean.
    #[arg(long, global = true)]
    pub metric: Option<String>,
    /// epanechnikov or gaussian.
    #[arg(long, global = true)]
    pub kernel: Option<String>,
    /// Number of random candidate directions.
    #[arg(long, global = true)]
    pub directions: Option<usize>,
    #[arg(long = "bootstrap-B", global = true, value_name = "B")]
    pub bootstrap_b: Option<usize>,
    /// per-direction or cached.
    #[arg(long, global = true)]
    pub tuning: Option<String>,
    /// members or midpoint.
    #[arg(long, global = true)]
    pub bin_loss: Option<String>,
    /// Finite-difference step for the plug-in covariance.
    #[arg(long, global = true)]
    pub fd_step: Option<f64>,
    /// Comma-separated bandwidth candidates, or `auto`.
    #[arg(long, global = true)]
    pub bandwidths: Option<String>,
    /// Comma-separated bin counts, or `auto`.
    #[arg(long, global = true)]
    pub bins: Option<String>,
    /// psd, correlation or unit-interval.
    #[arg(long, global = true)]
    pub matrix_constraint: Option<String>,
    /// Read sphere responses as compositions and take square roots.
    #[arg(long, global = true)]
    pub sqrt_transform: bool,
    /// Skip the local polish of the best grid direction.
    #[arg(long, global = true)]
    pub no_refine: bool,
}

impl GlobalArgs {
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let overrides: [(&str, Option<String>); 11] = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("workers", self.workers.map(|v| v.to_string())),
            ("metric", self.metric.clone()),
            ("kernel", self.kernel.clone()),
            ("directions", self.directions.map(|v| v.to_string())),
            ("bootstrap_b", self.bootstrap_b.map(|v| v.to_string())),
            ("tuning", self.tuning.clone()),
            ("bin_loss", self.bin_loss.clone()),
            ("fd_step", self.fd_step.map(|v| v.to_string())),
            ("bandwidths", self.bandwidths.clone()),
            ("bins", self.bins.clone()),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                config
                    .set(key, &v)
                    .map_err(|m| CliError::Input(format!("--{}: {m}", key.replace('_', "-"))))?;
            }
        }
        if let Some(c) = &self.matrix_constraint {
            config
                .set("matrix_constraint", c)
                .map_err(|m| CliError::Input(format!("--matrix-constraint: {m}")))?;
        }
        if self.sqrt_transform {
            config.sqrt_transform = true;
        }
        if self.no_refine {
            config.refine = false;
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    #[arg(long, value_name = "PATH")]
    pub predictors: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub responses: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the index direction and the fitted link.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Wald test of a linear hypothesis on the reduced direction.
    Test(commands::test::TestArgs),
    /// Predict responses at new predictor values.
    Predict {
        #[arg(long, value_name = "PATH")]
        fit: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// New predictor rows.
        #[arg(long = "new", value_name = "PATH")]
        new_predictors: PathBuf,
        /// Observed responses at the new rows, for RMPE.
        #[arg(long, value_name = "PATH")]
        truth: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Simulate a dataset or run a Monte Carlo study.
    Simulate(commands::simulate::SimulateArgs),
    /// Empirical size and power of the bootstrap Wald test.
    Power(commands::simulate::PowerArgs),
    /// Plot-ready tables from a result file.
    Plotdata {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        /// Boundary points of confidence ellipses.
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// 1-based reduced coordinates of the plotted ellipse.
        #[arg(long, default_value = "1,2")]
        coords: String,
    },
    /// Pearson correlation matrices from per-subject signal files.
    Correlate {
        /// One `T × m` signal file per subject.
        #[arg(required = true)]
        signals: Vec<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

pub fn run(cli: Cli) -> CliResult<()> {
    let config = cli.global.resolve()?;
    if let Some(w) = config.workers {
        // A pool that is already initialized keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match cli.command {
        Command::Fit { data, out } => commands::fit::run(&config, &data, out.as_deref()),
        Command::Test(args) => commands::test::run(&config, &args),
        Command::Predict {
            fit,
            data,
            new_predictors,
            truth,
            out,
        } => commands::predict::run(&config, &fit, &data, &new_predictors, truth.as_deref(), out.as_deref()),
        Command::Simulate(args) => commands::simulate::simulate(&config, &args),
        Command::Power(args) => commands::simulate::power(&config, &args),
        Command::Plotdata {
            input,
            out_dir,
            points,
            coords,
        } => commands::plotdata::run(&input, &out_dir, points, &coords),
        Command::Correlate { signals, out } => {
            let objects = dataset::correlations_from_signals(&signals)?;
            dataset::write_responses(&out, &objects)?;
            println!("wrote {} correlation matrices to {}", objects.len(), out.display());
            Ok(())
        }
    }
}
