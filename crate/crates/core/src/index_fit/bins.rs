use std::fmt;
use std::str::FromStr;

use crate::error::{IfrError, Result};
use crate::sample::Sample;

/// How a bin contributes to `V_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinLoss {
    /// Mean squared distance over every observation in the bin.
    #[default]
    Members,
    /// Squared distance of the single observation nearest the bin midpoint.
    Midpoint,
}

impl fmt::Display for BinLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BinLoss::Members => "members",
            BinLoss::Midpoint => "midpoint",
        })
    }
}

impl FromStr for BinLoss {
    type Err = IfrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "members" => Ok(BinLoss::Members),
            "midpoint" => Ok(BinLoss::Midpoint),
            other => Err(IfrError::InvalidInput(format!("unknown bin loss '{other}'"))),
        }
    }
}

/// Equal-width bins over the range of the projections with one
/// representative observation per non-empty bin.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedSample {
    /// `M + 1` edges of the requested bins, empty ones included.
    pub edges: Vec<f64>,
    /// Index of each non-empty bin's representative, in bin order.
    pub rep_index: Vec<usize>,
    pub rep_projection: Vec<f64>,
    /// Bin number of each representative.
    pub rep_bin: Vec<usize>,
    /// Observations in each non-empty bin, ascending.
    pub members: Vec<Vec<usize>>,
}

impl BinnedSample {
    /// Effective number of bins (empty bins dropped).
    pub fn len(&self) -> usize {
        self.rep_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep_index.is_empty()
    }

    pub fn requested(&self) -> usize {
        self.edges.len() - 1
    }

    /// Observations whose losses make up each bin's term under `mode`.
    pub fn groups(&self, mode: BinLoss) -> Vec<Vec<usize>> {
        match mode {
            BinLoss::Members => self.members.clone(),
            BinLoss::Midpoint => self.rep_index.iter().map(|&i| vec![i]).collect(),
        }
    }
}

/// Bins for the projections `Xᵢᵀθ̄` of `sample`.
pub fn make_bins(sample: &Sample, direction: &[f64], m: usize) -> Result<BinnedSample> {
    bin_projections(&sample.project(direction)?, m)
}

/// Splits `[min, max]` into `m` equal-width bins; each bin's representative
/// is the observation nearest its midpoint, ties going to the lower index.
pub fn bin_projections(projections: &[f64], m: usize) -> Result<BinnedSample> {
    if m == 0 {
        return Err(IfrError::InvalidInput("bin count must be at least 1".into()));
    }
    let lo = projections.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = projections.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) || !(hi - lo).is_finite() {
        return Err(IfrError::DegenerateProjection);
    }
    let width = (hi - lo) / m as f64;
    let mut edges: Vec<f64> = (0..m).map(|k| lo + width * k as f64).collect();
    edges.push(hi);

    let mut best: Vec<Option<(f64, usize)>> = vec![None; m];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, &t) in projections.iter().enumerate() {
        let mut l = (((t - lo) / width).floor().max(0.0) as usize).min(m - 1);
        while l > 0 && t < edges[l] {
            l -= 1;
        }
        while l + 1 < m && t >= edges[l + 1] {
            l += 1;
        }
        members[l].push(i);
        let mid = 0.5 * (edges[l] + edges[l + 1]);
        let gap = (t - mid).abs();
        if best[l].is_none_or(|(g, _)| gap < g) {
            best[l] = Some((gap, i));
        }
    }
    let mut out = BinnedSample {
        edges,
        rep_index: Vec::new(),
        rep_projection: Vec::new(),
        rep_bin: Vec::new(),
        members: Vec::new(),
    };
    for (l, (slot, group)) in best.into_iter().zip(members).enumerate() {
        if let Some((_, i)) = slot {
            out.rep_index.push(i);
            out.rep_projection.push(projections[i]);
            out.rep_bin.push(l);
            out.members.push(group);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_bin_example() {
        let b = bin_projections(&[0.0, 0.3, 0.6, 0.9], 2).unwrap();
        assert_eq!(b.edges, vec![0.0, 0.45, 0.9]);
        assert_eq!(b.rep_projection, vec![0.3, 0.6]);
        assert_eq!(b.members, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(b.groups(BinLoss::Midpoint), vec![vec![1], vec![2]]);
    }

    #[test]
    fn single_bin_and_bijection() {
        let t = [0.0, 0.2, 0.5, 0.9, 1.0];
        assert_eq!(bin_projections(&t, 1).unwrap().rep_index, vec![2]);
        let eq: Vec<f64> = (0..7).map(|i| i as f64).collect();
        assert_eq!(bin_projections(&eq, 7).unwrap().rep_index, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn empty_bins_dropped_and_degenerate_rejected() {
        let b = bin_projections(&[0.0, 0.05, 1.0], 4).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.requested(), 4);
        assert!(matches!(
            bin_projections(&[2.0, 2.0], 3),
            Err(IfrError::DegenerateProjection)
        ));
    }
}
