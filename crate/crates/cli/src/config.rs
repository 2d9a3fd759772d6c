//! Run configuration: flat `key = value` files overridden by command-line flags.

use std::path::Path;

use ifreg::index_fit::{BinLoss, FitConfig, Tuning};
use ifreg::local_frechet::KernelFamily;
use ifreg::{MatrixConstraint, MetricSpaceKind};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub metric: Option<MetricSpaceKind>,
    pub kernel: KernelFamily,
    pub directions: usize,
    /// `None` means the automatic grid.
    pub bandwidths: Option<Vec<f64>>,
    pub bins: Option<Vec<usize>>,
    pub bootstrap_b: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    pub tuning: Tuning,
    pub bin_loss: BinLoss,
    /// Finite-difference step for the plug-in covariance; `None` uses `M^(-1/5)`.
    pub fd_step: Option<f64>,
    pub refine: bool,
    pub matrix_constraint: MatrixConstraint,
    pub sqrt_transform: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            metric: None,
            kernel: KernelFamily::Epanechnikov,
            directions: 500,
            bandwidths: None,
            bins: None,
            bootstrap_b: 200,
            seed: 0,
            workers: None,
            tuning: Tuning::Cached,
            bin_loss: BinLoss::Members,
            fd_step: None,
            refine: true,
            matrix_constraint: MatrixConstraint::Psd,
            sqrt_transform: false,
        }
    }
}

pub fn parse_constraint(s: &str) -> Result<MatrixConstraint, String> {
    match s.trim() {
        "psd" | "covariance" => Ok(MatrixConstraint::Psd),
        "correlation" => Ok(MatrixConstraint::Correlation),
        "unit-interval" | "adjacency" => Ok(MatrixConstraint::UnitInterval),
        other => Err(format!("unknown matrix constraint '{other}'")),
    }
}

pub fn constraint_name(c: MatrixConstraint) -> &'static str {
    match c {
        MatrixConstraint::Psd => "psd",
        MatrixConstraint::Correlation => "correlation",
        MatrixConstraint::UnitInterval => "unit-interval",
    }
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Option<Vec<T>>, String> {
    if value == "auto" {
        return Ok(None);
    }
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| format!("'{}' is not a valid list entry", s.trim()))
        })
        .collect::<Result<Vec<T>, String>>()
        .map(Some)
}

fn positive(value: &str) -> Result<usize, String> {
    match value.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("expected a positive integer, got '{value}'")),
    }
}

impl RunConfig {
    /// Sets one key; the error message describes the value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let err = |e: ifreg::IfrError| e.to_string();
        match key {
            "metric" => self.metric = Some(value.parse().map_err(err)?),
            "kernel" => self.kernel = value.parse().map_err(err)?,
            "directions" => self.directions = positive(value)?,
            "bandwidths" => {
                self.bandwidths = parse_list(value)?;
                if let Some(b) = &self.bandwidths {
                    if b.is_empty() || b.iter().any(|v| !(*v > 0.0)) {
                        return Err("bandwidths must be positive".into());
                    }
                }
            }
            "bins" => {
                self.bins = parse_list(value)?;
                if self.bins.as_ref().is_some_and(|b| b.contains(&0)) {
                    return Err("bin counts must be positive".into());
                }
            }
            "bootstrap_b" | "bootstrap-B" => self.bootstrap_b = positive(value)?,
            "seed" => self.seed = value.parse().map_err(|_| format!("invalid seed '{value}'"))?,
            "workers" => self.workers = Some(positive(value)?),
            "tuning" => self.tuning = value.parse().map_err(err)?,
            "bin_loss" => self.bin_loss = value.parse().map_err(err)?,
            "fd_step" => {
                let h: f64 = value.parse().map_err(|_| format!("invalid step '{value}'"))?;
                if !(h > 0.0) {
                    return Err("fd_step must be positive".into());
                }
                self.fd_step = Some(h);
            }
            "refine" => {
                self.refine = value
                    .parse()
                    .map_err(|_| format!("expected true or false, got '{value}'"))?
            }
            "matrix_constraint" => self.matrix_constraint = parse_constraint(value)?,
            "sqrt_transform" => {
                self.sqrt_transform = value
                    .parse()
                    .map_err(|_| format!("expected true or false, got '{value}'"))?
            }
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        let mut config = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(CliError::parse(path, i + 1, 1, "expected 'key = value'"));
            };
            let key = line[..eq].trim();
            let value = line[eq + 1..].trim();
            let column = eq + 2 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
            config
                .set(key, value)
                .map_err(|m| CliError::parse(path, i + 1, column, m))?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn metric(&self) -> CliResult<MetricSpaceKind> {
        self.metric
            .ok_or_else(|| CliError::Input("no metric given (use --metric or 'metric' in the config)".into()))
    }

    pub fn fit_config(&self) -> FitConfig {
        FitConfig {
            n_directions: self.directions,
            bandwidths: self.bandwidths.clone(),
            bins: self.bins.clone(),
            kernel: self.kernel,
            tuning: self.tuning,
            bin_loss: self.bin_loss,
            refine: self.refine,
            seed: self.seed,
        }
    }
}
