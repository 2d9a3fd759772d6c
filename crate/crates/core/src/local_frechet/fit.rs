use super::kernel::{KernelFamily, KernelSpec};
use super::smoother::Smoother;
use super::weights::empirical_weights;
use crate::error::{IfrError, Result};
use crate::metric_spaces::{frechet_mean_of, MetricSpaceKind, ObjectValue};

const GRID_SIZE: usize = 10;

/// Local linear Fréchet regression estimate at index value `t`: the weighted
/// Fréchet mean of the responses under the local linear weights `Ŝᵢ/n`.
pub fn llfr_fit_at(
    responses: &[ObjectValue],
    projections: &[f64],
    t: f64,
    kernel: &KernelSpec,
    kind: MetricSpaceKind,
) -> Result<ObjectValue> {
    if responses.len() != projections.len() {
        return Err(IfrError::LengthMismatch {
            left: responses.len(),
            right: projections.len(),
        });
    }
    let w = empirical_weights(projections, t, kernel)?;
    weighted_fit(responses.iter().zip(&w.s), kind)
}

/// [`llfr_fit_at`] restricted to the observations listed in `subset`.
pub fn llfr_fit_subset(
    responses: &[ObjectValue],
    projections: &[f64],
    subset: &[usize],
    t: f64,
    kernel: &KernelSpec,
    kind: MetricSpaceKind,
) -> Result<ObjectValue> {
    let local: Vec<f64> = subset.iter().map(|&i| projections[i]).collect();
    let w = empirical_weights(&local, t, kernel)?;
    weighted_fit(subset.iter().map(|&i| &responses[i]).zip(&w.s), kind)
}

fn weighted_fit<'a>(
    pairs: impl Iterator<Item = (&'a ObjectValue, &'a f64)>,
    kind: MetricSpaceKind,
) -> Result<ObjectValue> {
    let mut items: Vec<(&ObjectValue, f64)> = pairs.filter(|(_, &s)| s != 0.0).map(|(o, &s)| (o, s)).collect();
    let total: f64 = items.iter().map(|(_, s)| s).sum();
    for item in items.iter_mut() {
        item.1 /= total;
    }
    frechet_mean_of(&items, kind)
}

/// 5-fold cross-validation for samples larger than 30, leave-one-out otherwise.
pub fn default_folds(n: usize) -> usize {
    if n > 30 {
        5
    } else {
        n
    }
}

/// Ten geometrically spaced bandwidths from range/20 to range/2.
pub fn default_bandwidth_grid(projections: &[f64]) -> Result<Vec<f64>> {
    let range = projection_range(projections)?;
    let (lo, hi) = (range / 20.0, range / 2.0);
    let ratio = (hi / lo).powf(1.0 / (GRID_SIZE - 1) as f64);
    let mut grid: Vec<f64> = (0..GRID_SIZE).map(|k| lo * ratio.powi(k as i32)).collect();
    grid[GRID_SIZE - 1] = hi;
    Ok(grid)
}

pub(crate) fn projection_range(projections: &[f64]) -> Result<f64> {
    let lo = projections.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = projections.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if !(range > 0.0 && range.is_finite()) {
        return Err(IfrError::DegenerateProjection);
    }
    Ok(range)
}

/// Cross-validated prediction error for each candidate bandwidth.
///
/// Observation `i` belongs to fold `i % folds`; a candidate whose held-out
/// fit fails anywhere scores `+∞`.
pub fn cv_bandwidth_scores(
    responses: &[ObjectValue],
    projections: &[f64],
    candidates: &[f64],
    folds: usize,
    family: KernelFamily,
    kind: MetricSpaceKind,
) -> Result<Vec<f64>> {
    let n = responses.len();
    if n != projections.len() {
        return Err(IfrError::LengthMismatch {
            left: n,
            right: projections.len(),
        });
    }
    if candidates.is_empty() {
        return Err(IfrError::InvalidInput("no candidate bandwidths".into()));
    }
    if folds < 2 || folds > n {
        return Err(IfrError::InvalidInput(format!(
            "cannot split {n} observations into {folds} folds"
        )));
    }
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..folds).map(|f| (0..n).partition(|i| i % folds != f)).collect();
    candidates
        .iter()
        .map(|&b| {
            let kernel = KernelSpec::new(family, b)?;
            Ok(cv_score(responses, projections, &splits, &kernel, kind))
        })
        .collect()
}

fn cv_score(
    responses: &[ObjectValue],
    projections: &[f64],
    splits: &[(Vec<usize>, Vec<usize>)],
    kernel: &KernelSpec,
    kind: MetricSpaceKind,
) -> f64 {
    let mut total = 0.0;
    for (train, held_out) in splits {
        let smoother = Smoother::on_subset(responses, projections, train.clone(), *kernel, kind);
        for &i in held_out {
            match smoother.loss_at(projections[i], i) {
                Ok(d2) => total += d2,
                Err(_) => return f64::INFINITY,
            }
        }
    }
    total / responses.len() as f64
}

/// Bandwidth with the smallest cross-validation score (ties go to the
/// smallest bandwidth).
pub fn cv_bandwidth(
    responses: &[ObjectValue],
    projections: &[f64],
    candidates: &[f64],
    folds: usize,
    family: KernelFamily,
    kind: MetricSpaceKind,
) -> Result<f64> {
    let scores = cv_bandwidth_scores(responses, projections, candidates, folds, family, kind)?;
    argmin_smallest(candidates, &scores).ok_or(IfrError::NoFeasibleBandwidth)
}

/// Candidate with the smallest finite score; ties resolved toward the
/// smaller candidate value.
pub(crate) fn argmin_smallest<T: Copy + PartialOrd>(candidates: &[T], scores: &[f64]) -> Option<T> {
    let mut best: Option<(f64, T)> = None;
    for (&c, &s) in candidates.iter().zip(scores) {
        if !s.is_finite() {
            continue;
        }
        best = match best {
            Some((bs, bc)) if s > bs || (s == bs && c >= bc) => Some((bs, bc)),
            _ => Some((s, c)),
        };
    }
    best.map(|(_, c)| c)
}
