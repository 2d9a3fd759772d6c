use super::bins::{bin_projections, BinLoss, BinnedSample};
use crate::error::{IfrError, Result};
use crate::local_frechet::{argmin_smallest, llfr_fit_at, KernelFamily, KernelSpec, Smoother};
use crate::metric_spaces::ObjectValue;
use crate::sample::Sample;

/// Bins, fitted objects and `V_n` for one direction at fixed `(b, M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionEval {
    pub criterion: f64,
    pub bins: BinnedSample,
    /// Local linear fits at the representatives' projections.
    pub fitted: Vec<ObjectValue>,
}

/// `V_n` as the mean over non-empty bins of the terms of [`group_losses`],
/// each observation's loss measured against the local linear fit on the full
/// sample. Under [`BinLoss::Members`] every observation counts once, so `V_n`
/// is the mean loss over the sample; under [`BinLoss::Midpoint`] only the
/// representatives count.
pub fn evaluate_direction(
    sample: &Sample,
    direction: &[f64],
    bandwidth: f64,
    bins: usize,
    family: KernelFamily,
    mode: BinLoss,
) -> Result<DirectionEval> {
    let kernel = KernelSpec::new(family, bandwidth)?;
    let proj = sample.project(direction)?;
    let binned = bin_projections(&proj, bins)?;
    let criterion = binned_criterion(sample, &proj, &binned, kernel, mode)?;
    let fitted: Vec<ObjectValue> = binned
        .rep_index
        .iter()
        .map(|&i| llfr_fit_at(sample.responses(), &proj, proj[i], &kernel, sample.kind()))
        .collect::<Result<_>>()?;
    Ok(DirectionEval {
        criterion,
        bins: binned,
        fitted,
    })
}

fn binned_criterion(
    sample: &Sample,
    proj: &[f64],
    binned: &BinnedSample,
    kernel: KernelSpec,
    mode: BinLoss,
) -> Result<f64> {
    let smoother = Smoother::new(sample.responses(), proj, kernel, sample.kind());
    let groups = binned.groups(mode);
    let mut sums = Vec::with_capacity(groups.len());
    for group in &groups {
        let mut sum = 0.0;
        for &i in group {
            sum += smoother.loss_at(proj[i], i)?;
        }
        sums.push(sum);
    }
    let terms = scale_terms(sums, &groups);
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

/// `ℓₗ = (M/N) Σ_{i∈gₗ} lossᵢ` with `N` the number of grouped observations,
/// so that the mean of the terms weighs every grouped observation equally.
fn scale_terms(sums: Vec<f64>, groups: &[Vec<usize>]) -> Vec<f64> {
    let total: usize = groups.iter().map(Vec::len).sum();
    let scale = groups.len() as f64 / total as f64;
    sums.into_iter().map(|s| s * scale).collect()
}

/// [`evaluate_direction`]'s criterion, with any failure mapped to `+∞`.
pub fn criterion_vn(
    sample: &Sample,
    direction: &[f64],
    bandwidth: f64,
    bins: usize,
    family: KernelFamily,
    mode: BinLoss,
) -> f64 {
    let value = || -> Result<f64> {
        let kernel = KernelSpec::new(family, bandwidth)?;
        let proj = sample.project(direction)?;
        let binned = bin_projections(&proj, bins)?;
        binned_criterion(sample, &proj, &binned, kernel, mode)
    };
    value().unwrap_or(f64::INFINITY)
}

/// Per-bin terms of `V_n` for fixed groups of observations, with the fit
/// recomputed on the full sample at `direction`. Term `l` is
/// `(M/N) Σ_{i∈gₗ} d²(Yᵢ, m̂(Xᵢᵀθ̄))` where `M` is the number of groups and
/// `N` their total size; the terms average to `V_n`.
pub fn group_losses(
    sample: &Sample,
    direction: &[f64],
    bandwidth: f64,
    family: KernelFamily,
    groups: &[Vec<usize>],
) -> Result<Vec<f64>> {
    if groups.is_empty() || groups.iter().any(Vec::is_empty) {
        return Err(IfrError::InvalidInput("bin groups must be nonempty".into()));
    }
    let kernel = KernelSpec::new(family, bandwidth)?;
    let proj = sample.project(direction)?;
    let smoother = Smoother::new(sample.responses(), &proj, kernel, sample.kind());
    let sums = groups
        .iter()
        .map(|group| {
            let mut sum = 0.0;
            for &i in group {
                sum += smoother.loss_at(proj[i], i)?;
            }
            Ok(sum)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(scale_terms(sums, groups))
}

/// Leave-one-out score for each candidate bin count: `V_n` with every
/// observation's fit computed without that observation. Under
/// [`BinLoss::Members`] the score does not depend on the bin count.
pub fn cv_bins_scores(
    sample: &Sample,
    direction: &[f64],
    bandwidth: f64,
    family: KernelFamily,
    candidates: &[usize],
    mode: BinLoss,
) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Err(IfrError::InvalidInput("no candidate bin counts".into()));
    }
    let kernel = KernelSpec::new(family, bandwidth)?;
    let proj = sample.project(direction)?;
    let smoother = Smoother::new(sample.responses(), &proj, kernel, sample.kind());
    // Leave-one-out losses are shared across candidates; NaN marks a failure.
    let mut loo: Vec<Option<f64>> = vec![None; sample.n()];
    let mut loo_loss =
        |i: usize| -> f64 { *loo[i].get_or_insert_with(|| smoother.loss_without(proj[i], i).unwrap_or(f64::NAN)) };
    Ok(candidates
        .iter()
        .map(|&m| {
            let Ok(binned) = bin_projections(&proj, m) else {
                return f64::INFINITY;
            };
            let groups = binned.groups(mode);
            let sums: Vec<f64> = groups.iter().map(|g| g.iter().map(|&i| loo_loss(i)).sum()).collect();
            let terms = scale_terms(sums, &groups);
            let score = terms.iter().sum::<f64>() / terms.len() as f64;
            if score.is_nan() {
                f64::INFINITY
            } else {
                score
            }
        })
        .collect())
}

/// Bin count with the smallest leave-one-out score; ties go
/// to the smallest count.
pub fn cv_bins(
    sample: &Sample,
    direction: &[f64],
    bandwidth: f64,
    family: KernelFamily,
    candidates: &[usize],
    mode: BinLoss,
) -> Result<usize> {
    let scores = cv_bins_scores(sample, direction, bandwidth, family, candidates, mode)?;
    argmin_smallest(candidates, &scores).ok_or(IfrError::NoFeasibleBins)
}
