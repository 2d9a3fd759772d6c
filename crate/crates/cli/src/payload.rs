//! Result files: TOML documents tagged with `schema_version` and `kind`.
//!
//! Floating-point values are written with the shortest representation that
//! reads back to the same bits, so a result reproduces exactly.

use std::path::Path;

use ifreg::index_fit::{IfrFit, SearchStage};
use ifreg::{MetricSpaceKind, ObjectValue};
use nalgebra::DMatrix;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub evaluated: usize,
    pub grid: usize,
    pub refine: usize,
    pub failed: usize,
    pub zero_variance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedBins {
    pub rep_index: Vec<usize>,
    pub projection: Vec<f64>,
    /// Probability grid of distributional fits.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub probs: Option<Vec<f64>>,
    pub objects: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPayload {
    pub schema_version: u32,
    pub kind: String,
    pub metric: String,
    pub kernel: String,
    pub bin_loss: String,
    pub tuning: String,
    pub seed: u64,
    pub directions: usize,
    pub n: usize,
    pub p: usize,
    pub theta: Vec<f64>,
    pub theta_reduced: Vec<f64>,
    pub bandwidth: f64,
    pub bins: usize,
    pub effective_bins: usize,
    pub criterion: f64,
    pub search: SearchSummary,
    pub fitted: FittedBins,
}

impl FitPayload {
    pub fn from_fit(
        fit: &IfrFit,
        kind: MetricSpaceKind,
        tuning: String,
        seed: u64,
        directions: usize,
        n: usize,
    ) -> Self {
        let entries = &fit.search_log.entries;
        let refine = entries.iter().filter(|e| e.stage == SearchStage::Refine).count();
        let probs = match fit.fitted.first() {
            Some(ObjectValue::Quantile(q)) => Some(q.probs().to_vec()),
            _ => None,
        };
        FitPayload {
            schema_version: SCHEMA_VERSION,
            kind: "fit".into(),
            metric: kind.name().into(),
            kernel: fit.kernel.name().into(),
            bin_loss: fit.bin_loss.to_string(),
            tuning,
            seed,
            directions,
            n,
            p: fit.direction.p(),
            theta: fit.direction.full().to_vec(),
            theta_reduced: fit.direction.reduced().to_vec(),
            bandwidth: fit.bandwidth,
            bins: fit.bins,
            effective_bins: fit.binned.len(),
            criterion: fit.criterion,
            search: SearchSummary {
                evaluated: entries.len(),
                grid: entries.len() - refine,
                refine,
                failed: fit.search_log.failed,
                zero_variance: fit.search_log.zero_variance,
            },
            fitted: FittedBins {
                rep_index: fit.binned.rep_index.clone(),
                projection: fit.binned.rep_projection.clone(),
                probs,
                objects: fit.fitted.iter().map(|o| o.as_slice().to_vec()).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisPayload {
    pub matrix: Vec<Vec<f64>>,
    pub zeta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPayload {
    pub center: Vec<f64>,
    pub shape: Vec<Vec<f64>>,
    pub threshold: f64,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPayload {
    pub step: usize,
    /// 1-based predictor column.
    pub column: usize,
    pub p_value: f64,
    pub entered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestPayload {
    pub schema_version: u32,
    pub kind: String,
    pub covariance: String,
    pub bootstrap_b: usize,
    pub failed_replicates: usize,
    pub bins: usize,
    pub theta_reduced: Vec<f64>,
    pub lambda: Vec<Vec<f64>>,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub gamma: f64,
    pub hypothesis: HypothesisPayload,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub region: Option<RegionPayload>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepwisePayload {
    pub schema_version: u32,
    pub kind: String,
    pub alpha_to_enter: f64,
    /// 1-based predictor columns in the final model.
    pub selected: Vec<usize>,
    pub steps: Vec<StepPayload>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRowPayload {
    pub delta: f64,
    pub rejections: usize,
    pub completed: usize,
    pub failed: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerPayload {
    pub schema_version: u32,
    pub kind: String,
    pub scenario: String,
    pub n: usize,
    pub p: usize,
    pub runs: usize,
    pub alpha: f64,
    pub bootstrap_b: usize,
    pub seed: u64,
    pub rows: Vec<PowerRowPayload>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyPayload {
    pub schema_version: u32,
    pub kind: String,
    pub scenario: String,
    pub link: String,
    pub n: usize,
    pub p: usize,
    pub runs: usize,
    pub seed: u64,
    pub theta0: Vec<f64>,
    pub bias: f64,
    pub dev: f64,
    pub mean_msd: f64,
    pub mean_gfr_msd: f64,
    pub failed: usize,
    pub msd: Vec<f64>,
    pub gfr_msd: Vec<f64>,
    pub estimates: Vec<Vec<f64>>,
}

/// Metadata written next to a simulated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthPayload {
    pub schema_version: u32,
    pub kind: String,
    pub scenario: String,
    pub link: String,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub theta0: Vec<f64>,
    pub rho: f64,
    pub nodes: usize,
    pub noise_sd: f64,
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn rows_matrix(rows: &[Vec<f64>]) -> CliResult<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(CliError::Input("ragged matrix in result file".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn to_text<T: Serialize>(value: &T) -> CliResult<String> {
    toml::to_string(value).map_err(|e| CliError::Input(format!("cannot serialize result: {e}")))
}

pub fn write<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_atomic(path, &to_text(value)?)
}

/// The `kind` tag of a result file.
pub fn kind_of(text: &str, path: &Path) -> CliResult<String> {
    #[derive(Deserialize)]
    struct Tag {
        schema_version: u32,
        kind: String,
    }
    let tag: Tag = toml::from_str(text).map_err(|e| toml_error(path, text, e))?;
    if tag.schema_version != SCHEMA_VERSION {
        return Err(CliError::Input(format!(
            "{}: schema version {} is not supported (expected {SCHEMA_VERSION})",
            path.display(),
            tag.schema_version
        )));
    }
    Ok(tag.kind)
}

pub fn parse<T: DeserializeOwned>(text: &str, path: &Path, expected: &str) -> CliResult<T> {
    let kind = kind_of(text, path)?;
    if kind != expected {
        return Err(CliError::Input(format!(
            "{}: expected a '{expected}' result, found '{kind}'",
            path.display()
        )));
    }
    toml::from_str(text).map_err(|e| toml_error(path, text, e))
}

pub fn read<T: DeserializeOwned>(path: &Path, expected: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, path, expected)
}

fn toml_error(path: &Path, text: &str, e: toml::de::Error) -> CliError {
    let (line, column) = match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            (line, column)
        }
        None => (1, 1),
    };
    CliError::parse(path, line, column, e.message().to_string())
}
