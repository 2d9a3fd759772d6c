use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use super::finite_diff::{fit_losses, hess_vn, sigma_hat, FiniteDiffConfig};
use crate::error::{IfrError, Result};
use crate::index_fit::{fit_ifr, FitConfig, IfrFit, Tuning};
use crate::linalg::{checked_inverse, sym_condition, symmetrize};
use crate::rng::stream_rng;
use crate::sample::Sample;

const MAX_CONDITION: f64 = 1e12;
const MIN_REPLICATES: usize = 50;
const MAX_FAILURE_RATE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceSource {
    Plugin,
    Bootstrap,
}

/// Asymptotic covariance of `√M(θ̂ − θ₀)` in the reduced parametrization.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    pub lambda: DMatrix<f64>,
    pub source: CovarianceSource,
    /// Present for the plug-in estimate only.
    pub sigma_hat: Option<DMatrix<f64>>,
    pub hess: Option<DMatrix<f64>>,
    /// `∂θ̄/∂θ` at the estimate, `p × (p − 1)`.
    pub jacobian: DMatrix<f64>,
    /// Number of bins `M` that `lambda` is scaled by.
    pub bins: usize,
    /// Bootstrap replicates that failed (zero for the plug-in estimate).
    pub failed: usize,
}

impl CovarianceEstimate {
    /// Delta-method covariance `JΛJᵀ` of the full direction.
    pub fn full_covariance(&self) -> DMatrix<f64> {
        symmetrize(&(&self.jacobian * &self.lambda * self.jacobian.transpose()))
    }
}

/// Sandwich `H⁻¹ΣH⁻¹`, symmetrized.
pub fn lambda_plugin(sigma: &DMatrix<f64>, hess: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = checked_inverse(&symmetrize(hess), MAX_CONDITION).map_err(|_| IfrError::SingularHessian {
        condition: sym_condition(hess),
    })?;
    Ok(symmetrize(&(&inv * sigma * &inv)))
}

/// Plug-in covariance at a fitted direction with finite-difference step `h`.
pub fn plugin_covariance(sample: &Sample, fit: &IfrFit, fd: FiniteDiffConfig) -> Result<CovarianceEstimate> {
    let loss = fit_losses(sample, fit);
    let theta = fit.direction.reduced();
    let sigma = sigma_hat(&loss, theta, fd.h)?;
    let hess = hess_vn(&loss, theta, fd.h)?;
    let lambda = lambda_plugin(&sigma, &hess)?;
    Ok(CovarianceEstimate {
        lambda,
        source: CovarianceSource::Plugin,
        sigma_hat: Some(sigma),
        hess: Some(hess),
        jacobian: fit.direction.jacobian(),
        bins: fit.binned.len(),
        failed: 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapOutcome {
    /// `(M/B) Σ (θ̂* − θ̂)(θ̂* − θ̂)ᵀ` over successful replicates.
    pub lambda: DMatrix<f64>,
    pub estimates: Vec<Vec<f64>>,
    pub failed: usize,
}

/// Bootstrap moment estimator around `theta_hat` with a caller-provided
/// estimator that maps resampled indices to a reduced direction.
///
/// Replicate `b` draws its indices from stream `b` of `seed`.
pub fn bootstrap_lambda_with<F>(
    n: usize,
    theta_hat: &[f64],
    bins: usize,
    replicates: usize,
    seed: u64,
    estimator: F,
) -> Result<BootstrapOutcome>
where
    F: Fn(&[usize]) -> Result<Vec<f64>> + Sync,
{
    if replicates < MIN_REPLICATES {
        return Err(IfrError::InvalidInput(format!(
            "bootstrap needs at least {MIN_REPLICATES} replicates, got {replicates}"
        )));
    }
    let results: Vec<Option<Vec<f64>>> = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            estimator(&idx).ok().filter(|t| t.len() == theta_hat.len())
        })
        .collect();
    let estimates: Vec<Vec<f64>> = results.into_iter().flatten().collect();
    let failed = replicates - estimates.len();
    if failed as f64 > MAX_FAILURE_RATE * replicates as f64 {
        return Err(IfrError::BootstrapFailure {
            failed,
            total: replicates,
        });
    }
    let k = theta_hat.len();
    let mut lambda = DMatrix::zeros(k, k);
    for t in &estimates {
        let d = nalgebra::DVector::from_iterator(k, t.iter().zip(theta_hat).map(|(a, b)| a - b));
        lambda += &d * d.transpose();
    }
    lambda *= bins as f64 / estimates.len() as f64;
    Ok(BootstrapOutcome {
        lambda: symmetrize(&lambda),
        estimates,
        failed,
    })
}

/// Bootstrap covariance of a fit: each replicate refits on a resample with
/// `(b*, M*)` and the direction-grid seed of `config` held fixed.
pub fn bootstrap_lambda(
    sample: &Sample,
    fit: &IfrFit,
    config: &FitConfig,
    replicates: usize,
    seed: u64,
) -> Result<CovarianceEstimate> {
    let fixed = FitConfig {
        tuning: Tuning::Fixed {
            bandwidth: fit.bandwidth,
            bins: fit.bins,
        },
        kernel: fit.kernel,
        ..config.clone()
    };
    let bins = fit.binned.len();
    let out = bootstrap_lambda_with(sample.n(), fit.direction.reduced(), bins, replicates, seed, |idx| {
        let boot = sample.resample(idx);
        fit_ifr(&boot, &fixed).map(|f| f.direction.reduced().to_vec())
    })?;
    Ok(CovarianceEstimate {
        lambda: out.lambda,
        source: CovarianceSource::Bootstrap,
        sigma_hat: None,
        hess: None,
        jacobian: fit.direction.jacobian(),
        bins,
        failed: out.failed,
    })
}
