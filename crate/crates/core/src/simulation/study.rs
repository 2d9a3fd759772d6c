use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use super::generators::{
    adjacency_error_bounds, adjacency_predictor_cov, euclidean_predictor_cov, expit, gen_predictors,
    gen_response_adjacency, gen_response_euclidean, gen_response_setting1, gen_response_setting2, gen_truncated_mvn,
    Link,
};
use super::metrics::{bias_dev, msd};
use crate::error::{IfrError, Result};
use crate::index_fit::{fit_ifr, gfr_fit, DirectionParam, FitConfig, IfrFit};
use crate::inference::{bootstrap_lambda, wald_test};
use crate::metric_spaces::{
    EuclideanVec, MatrixConstraint, MetricSpaceKind, ObjectValue, ProbGrid, QuantileFunction, SymMatrix,
};
use crate::rng::{child_seed, stream_rng};
use crate::sample::Sample;

const ADJACENCY_BOUND: f64 = 5.0;
const EUCLIDEAN_BOUND: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Normal distributions with random location and exponential scale.
    DistSettingI,
    /// Normal distributions pushed through a random transport map.
    DistSettingII,
    /// Weighted networks as symmetric matrices with entries in [0, 1].
    Adjacency,
    /// Scalar responses.
    Euclidean,
}

impl Scenario {
    pub fn kind(self) -> MetricSpaceKind {
        match self {
            Scenario::DistSettingI | Scenario::DistSettingII => MetricSpaceKind::Wasserstein2,
            Scenario::Adjacency => MetricSpaceKind::Frobenius,
            Scenario::Euclidean => MetricSpaceKind::Euclidean,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::DistSettingI => "setting1",
            Scenario::DistSettingII => "setting2",
            Scenario::Adjacency => "adjacency",
            Scenario::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = IfrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "setting1" | "dist1" => Ok(Scenario::DistSettingI),
            "setting2" | "dist2" => Ok(Scenario::DistSettingII),
            "adjacency" => Ok(Scenario::Adjacency),
            "euclidean" => Ok(Scenario::Euclidean),
            other => Err(IfrError::InvalidInput(format!("unknown scenario '{other}'"))),
        }
    }
}

/// A simulation design.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub scenario: Scenario,
    pub link: Link,
    pub n: usize,
    pub p: usize,
    pub theta0: DirectionParam,
    /// Equicorrelation of the copula predictors (distribution settings).
    pub rho: f64,
    pub grid: Arc<ProbGrid>,
    /// Network size for [`Scenario::Adjacency`].
    pub nodes: usize,
    /// Noise standard deviation for [`Scenario::Euclidean`].
    pub noise_sd: f64,
}

/// A fixed, asymmetric default direction for `p` predictors.
pub fn default_theta0(p: usize) -> DirectionParam {
    const PATTERN: [f64; 6] = [0.5, -0.5, 0.8, 0.3, -0.3, -0.8];
    let mut v = vec![1.0];
    v.extend((0..p.saturating_sub(1)).map(|i| PATTERN[i % PATTERN.len()]));
    DirectionParam::from_vector(&v).expect("leading coordinate is one")
}

impl SimSpec {
    /// Defaults: identity link (expit for networks), the default direction,
    /// ρ = 0.25, the standard probability grid, 10 nodes, noise sd 0.1.
    pub fn new(scenario: Scenario, n: usize, p: usize) -> Self {
        SimSpec {
            scenario,
            link: if scenario == Scenario::Adjacency {
                Link::Expit
            } else {
                Link::Identity
            },
            n,
            p,
            theta0: default_theta0(p),
            rho: 0.25,
            grid: ProbGrid::standard(),
            nodes: 10,
            noise_sd: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(IfrError::InvalidInput(format!(
                "simulation needs n >= 10, got {}",
                self.n
            )));
        }
        if self.p < 2 || self.theta0.p() != self.p {
            return Err(IfrError::Dimension(format!(
                "theta0 has {} coordinates for p = {}",
                self.theta0.p(),
                self.p
            )));
        }
        if (self.link == Link::Expit) != (self.scenario == Scenario::Adjacency) {
            return Err(IfrError::InvalidInput(
                "the expit link goes with network responses only".into(),
            ));
        }
        if self.scenario == Scenario::Adjacency && self.nodes < 2 {
            return Err(IfrError::InvalidInput("networks need at least 2 nodes".into()));
        }
        if !(self.noise_sd >= 0.0) {
            return Err(IfrError::InvalidInput("noise sd must be nonnegative".into()));
        }
        Ok(())
    }

    /// Conditional Fréchet mean at index value `t`.
    pub fn truth(&self, t: f64) -> ObjectValue {
        let phi = Normal::standard();
        match self.scenario {
            Scenario::DistSettingI | Scenario::DistSettingII => {
                let zeta = self.link.apply(t);
                let scale = if self.scenario == Scenario::DistSettingI {
                    expit(t)
                } else {
                    0.1
                };
                let values = self
                    .grid
                    .probs()
                    .iter()
                    .map(|&s| zeta + scale * phi.inverse_cdf(s))
                    .collect();
                QuantileFunction::new(self.grid.clone(), values)
                    .expect("monotone")
                    .into()
            }
            Scenario::Adjacency => {
                let zeta = expit(t);
                let (lo, hi) = adjacency_error_bounds(zeta);
                let mid = 0.5 * (lo + hi);
                let m = self.nodes;
                let entries = (0..m * m)
                    .map(|i| if i / m == i % m { zeta + mid } else { mid }.clamp(0.0, 1.0))
                    .collect();
                SymMatrix::new(m, entries, MatrixConstraint::UnitInterval)
                    .expect("valid")
                    .into()
            }
            Scenario::Euclidean => EuclideanVec::from_parts(vec![self.link.apply(t)]).into(),
        }
    }
}

/// A simulated sample with its true index values and regression objects.
#[derive(Debug, Clone)]
pub struct SimData {
    pub sample: Sample,
    pub index: Vec<f64>,
    pub truth: Vec<ObjectValue>,
}

/// Draws one dataset from `spec`.
pub fn generate(spec: &SimSpec, seed: u64) -> Result<SimData> {
    spec.validate()?;
    let mut rng = stream_rng(seed, 0);
    let x = match spec.scenario {
        Scenario::DistSettingI | Scenario::DistSettingII => gen_predictors(spec.n, spec.p, spec.rho, &mut rng)?,
        Scenario::Adjacency => gen_truncated_mvn(spec.n, &adjacency_predictor_cov(spec.p), ADJACENCY_BOUND, &mut rng)?,
        Scenario::Euclidean => gen_truncated_mvn(spec.n, &euclidean_predictor_cov(spec.p), EUCLIDEAN_BOUND, &mut rng)?,
    };
    let index: Vec<f64> = (0..spec.n)
        .map(|i| x.row(i).iter().zip(spec.theta0.full()).map(|(a, b)| a * b).sum())
        .collect();
    let responses: Vec<ObjectValue> = index
        .iter()
        .map(|&t| match spec.scenario {
            Scenario::DistSettingI => gen_response_setting1(t, spec.link, &spec.grid, &mut rng).into(),
            Scenario::DistSettingII => gen_response_setting2(t, spec.link, &spec.grid, &mut rng).into(),
            Scenario::Adjacency => gen_response_adjacency(t, spec.nodes, &mut rng).into(),
            Scenario::Euclidean => gen_response_euclidean(t, spec.link, spec.noise_sd, &mut rng).into(),
        })
        .collect();
    let truth = index.iter().map(|&t| spec.truth(t)).collect();
    let sample = Sample::new(x, responses, spec.scenario.kind())?;
    Ok(SimData { sample, index, truth })
}

/// Result of one Monte Carlo replication.
#[derive(Debug, Clone, PartialEq)]
pub struct McRun {
    pub estimate: DirectionParam,
    /// IFR fits against the truth at the bin representatives.
    pub msd: f64,
    /// Global Fréchet regression at the same representatives.
    pub gfr_msd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub estimates: Vec<DirectionParam>,
    pub bias: f64,
    pub dev: f64,
    pub msd: Vec<f64>,
    pub gfr_msd: Vec<f64>,
    /// Runs that failed and were left out.
    pub failed: usize,
}

/// Seeds for run `r`: data, direction grid and bootstrap.
fn run_seeds(seed: u64, r: usize) -> (u64, u64, u64) {
    let base = 3 * r as u64;
    (
        child_seed(seed, base),
        child_seed(seed, base + 1),
        child_seed(seed, base + 2),
    )
}

/// Fits one simulated dataset and scores the fit against the truth.
pub fn evaluate_run(spec: &SimSpec, data: &SimData, fit: &IfrFit) -> Result<McRun> {
    let reps = &fit.binned.rep_index;
    let truth: Vec<ObjectValue> = reps.iter().map(|&i| data.truth[i].clone()).collect();
    let kind = spec.scenario.kind();
    let ifr = msd(&fit.fitted, &truth, kind)?;
    let x = data.sample.predictors();
    let at = DMatrix::from_fn(reps.len(), x.ncols(), |r, c| x[(reps[r], c)]);
    let gfr = msd(&gfr_fit(&data.sample, &at)?, &truth, kind)?;
    Ok(McRun {
        estimate: fit.direction.clone(),
        msd: ifr,
        gfr_msd: gfr,
    })
}

/// `runs` independent replications of generate → fit → score.
pub fn run_mc_study(spec: &SimSpec, runs: usize, config: &FitConfig, seed: u64) -> Result<McReport> {
    spec.validate()?;
    if runs == 0 {
        return Err(IfrError::InvalidInput("runs must be at least 1".into()));
    }
    let results: Vec<Result<McRun>> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let (data_seed, grid_seed, _) = run_seeds(seed, r);
            let data = generate(spec, data_seed)?;
            let fit = fit_ifr(
                &data.sample,
                &FitConfig {
                    seed: grid_seed,
                    ..config.clone()
                },
            )?;
            evaluate_run(spec, &data, &fit)
        })
        .collect();
    let ok: Vec<McRun> = results.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
    let failed = runs - ok.len();
    if ok.is_empty() {
        let first = results.into_iter().find_map(|r| r.err()).expect("all runs failed");
        return Err(IfrError::FitFailure(format!("every run failed; first error: {first}")));
    }
    let estimates: Vec<DirectionParam> = ok.iter().map(|r| r.estimate.clone()).collect();
    let (bias, dev) = bias_dev(&estimates, &spec.theta0)?;
    Ok(McReport {
        estimates,
        bias,
        dev,
        msd: ok.iter().map(|r| r.msd).collect(),
        gfr_msd: ok.iter().map(|r| r.gfr_msd).collect(),
        failed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub delta: f64,
    pub rejections: usize,
    pub completed: usize,
    pub failed: usize,
}

impl PowerRow {
    pub fn rate(&self) -> f64 {
        if self.completed == 0 {
            f64::NAN
        } else {
            self.rejections as f64 / self.completed as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerTable {
    pub alpha: f64,
    pub rows: Vec<PowerRow>,
}

/// Bootstrap Wald test of `θ₀₂ = … = θ₀p = 0` on one dataset; returns the
/// rejection decision.
pub fn null_test_once(
    sample: &Sample,
    config: &FitConfig,
    replicates: usize,
    boot_seed: u64,
    alpha: f64,
) -> Result<bool> {
    let fit = fit_ifr(sample, config)?;
    let cov = bootstrap_lambda(sample, &fit, config, replicates, boot_seed)?;
    let k = sample.p() - 1;
    let test = wald_test(
        fit.direction.reduced(),
        &DMatrix::identity(k, k),
        &vec![0.0; k],
        &cov.lambda,
        cov.bins,
        alpha,
    )?;
    Ok(test.reject)
}

/// Empirical rejection rates of the null test under `θ₀ = lift(δ, …, δ)`.
///
/// Run `r` reuses the same data, grid and bootstrap seeds at every `δ`.
pub fn run_size_power_study(
    spec: &SimSpec,
    deltas: &[f64],
    runs: usize,
    alpha: f64,
    replicates: usize,
    config: &FitConfig,
    seed: u64,
) -> Result<PowerTable> {
    if runs == 0 || deltas.is_empty() {
        return Err(IfrError::InvalidInput("need at least one run and one delta".into()));
    }
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let theta0 = DirectionParam::lift(&vec![delta; spec.p - 1])?;
        let spec_d = SimSpec { theta0, ..spec.clone() };
        spec_d.validate()?;
        let outcomes: Vec<Result<bool>> = (0..runs)
            .into_par_iter()
            .map(|r| {
                let (data_seed, grid_seed, boot_seed) = run_seeds(seed, r);
                let data = generate(&spec_d, data_seed)?;
                let cfg = FitConfig {
                    seed: grid_seed,
                    ..config.clone()
                };
                null_test_once(&data.sample, &cfg, replicates, boot_seed, alpha)
            })
            .collect();
        let completed = outcomes.iter().filter(|o| o.is_ok()).count();
        let rejections = outcomes.iter().filter(|o| matches!(o, Ok(true))).count();
        rows.push(PowerRow {
            delta,
            rejections,
            completed,
            failed: runs - completed,
        });
    }
    Ok(PowerTable { alpha, rows })
}
