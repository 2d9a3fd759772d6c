//! Forward finite differences of `V_n` in the reduced parametrization,
//! with the bins held fixed.

use nalgebra::DMatrix;

use crate::error::{IfrError, Result};
use crate::index_fit::{group_losses, DirectionParam, IfrFit};
use crate::sample::Sample;

/// Forward-difference step in reduced-parameter units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDiffConfig {
    pub h: f64,
}

impl FiniteDiffConfig {
    /// `h = M^(−1/5)`.
    pub fn for_bins(m: usize) -> Self {
        FiniteDiffConfig {
            h: (m.max(1) as f64).powf(-0.2),
        }
    }
}

/// Per-bin losses of a fit as a function of the reduced direction, with the
/// fit's bin groups held fixed.
pub fn fit_losses<'a>(sample: &'a Sample, fit: &'a IfrFit) -> impl Fn(&[f64]) -> Result<Vec<f64>> + Sync + 'a {
    let groups = fit.binned.groups(fit.bin_loss);
    move |theta: &[f64]| {
        let dir = DirectionParam::lift(theta)?;
        group_losses(sample, dir.full(), fit.bandwidth, fit.kernel, &groups)
    }
}

fn in_ball(theta: &[f64]) -> bool {
    theta.iter().map(|v| v * v).sum::<f64>() < 1.0
}

fn shifted(theta: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut t = theta.to_vec();
    for &(r, s) in moves {
        t[r] += s;
    }
    t
}

/// Signed step for coordinate `r`: forward when `θ + h e_r` stays inside the
/// unit ball (as does `θ + 2h e_r` when `reach` is 2), backward otherwise.
fn step_for(theta: &[f64], r: usize, h: f64, reach: f64) -> Result<f64> {
    for s in [h, -h] {
        if in_ball(&shifted(theta, &[(r, reach * s)])) {
            return Ok(s);
        }
    }
    Err(IfrError::StepError { coordinate: r })
}

fn check(theta: &[f64], h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(IfrError::InvalidInput(format!("step must be positive, got {h}")));
    }
    if !in_ball(theta) {
        return Err(IfrError::OutOfBall {
            norm: theta.iter().map(|v| v * v).sum::<f64>().sqrt(),
        });
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Difference quotients `(fₗ(θ + s_r e_r) − fₗ(θ))/s_r`, one row per
/// representative and one column per coordinate.
fn quotients<F>(loss: &F, theta: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    check(theta, h)?;
    let base = loss(theta)?;
    let k = theta.len();
    let mut q = DMatrix::zeros(base.len(), k);
    for r in 0..k {
        let s = step_for(theta, r, h, 1.0)?;
        let moved = loss(&shifted(theta, &[(r, s)]))?;
        for (l, (a, b)) in moved.iter().zip(&base).enumerate() {
            q[(l, r)] = (a - b) / s;
        }
    }
    Ok(q)
}

/// Forward-difference gradient of `V_n = mean(fₗ)`.
pub fn grad_vn<F>(loss: &F, theta: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let q = quotients(loss, theta, h)?;
    Ok((0..theta.len()).map(|r| q.column(r).mean()).collect())
}

/// Second forward differences of `V_n`, symmetrized.
pub fn hess_vn<F>(loss: &F, theta: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    check(theta, h)?;
    let k = theta.len();
    let f0 = mean(&loss(theta)?);
    let steps: Vec<f64> = (0..k).map(|r| step_for(theta, r, h, 2.0)).collect::<Result<_>>()?;
    let single: Vec<f64> = (0..k)
        .map(|r| Ok(mean(&loss(&shifted(theta, &[(r, steps[r])]))?)))
        .collect::<Result<_>>()?;
    let mut hess = DMatrix::zeros(k, k);
    for r in 0..k {
        for s in r..k {
            let moves = [(r, steps[r]), (s, steps[s])];
            let probe = shifted(theta, &moves);
            if !in_ball(&probe) {
                return Err(IfrError::StepError { coordinate: s });
            }
            let f_rs = mean(&loss(&probe)?);
            let v = (f_rs - single[r] - single[s] + f0) / (steps[r] * steps[s]);
            hess[(r, s)] = v;
            hess[(s, r)] = v;
        }
    }
    Ok(hess)
}

/// Covariance of the per-representative difference quotients: mean of the
/// products minus the product of the means.
pub fn sigma_hat<F>(loss: &F, theta: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let q = quotients(loss, theta, h)?;
    let m = q.nrows() as f64;
    let k = theta.len();
    let means: Vec<f64> = (0..k).map(|r| q.column(r).mean()).collect();
    let mut sigma = DMatrix::zeros(k, k);
    for r in 0..k {
        for s in r..k {
            let cross = q.column(r).dot(&q.column(s)) / m;
            let v = cross - means[r] * means[s];
            sigma[(r, s)] = v;
            sigma[(s, r)] = v;
        }
    }
    Ok(sigma)
}
