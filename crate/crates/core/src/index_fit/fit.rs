use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::bins::{BinLoss, BinnedSample};
use super::criterion::{criterion_vn, cv_bins, evaluate_direction};
use super::direction::{sample_directions, DirectionParam};
use crate::error::{IfrError, Result};
use crate::local_frechet::{cv_bandwidth, default_bandwidth_grid, default_folds, projection_range, KernelFamily};
use crate::metric_spaces::ObjectValue;
use crate::sample::Sample;

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const REFINE_BUDGET: usize = 50;
const REFINE_WIDTHS: [f64; 2] = [0.2, 0.05];
const BALL_MARGIN: f64 = 1e-9;
const CACHED_ROUNDS: usize = 2;

/// How `(b, M)` are chosen during the direction search.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Tuning {
    /// Cross-validate `(b, M)` separately at every candidate direction.
    PerDirection,
    /// Pilot pass with default `(b, M)`, then cross-validate at the best
    /// direction and re-search with those values (at most twice).
    #[default]
    Cached,
    /// Use the given values everywhere.
    Fixed { bandwidth: f64, bins: usize },
}

impl fmt::Display for Tuning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tuning::PerDirection => f.write_str("per-direction"),
            Tuning::Cached => f.write_str("cached"),
            Tuning::Fixed { .. } => f.write_str("fixed"),
        }
    }
}

impl FromStr for Tuning {
    type Err = IfrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "per-direction" => Ok(Tuning::PerDirection),
            "cached" => Ok(Tuning::Cached),
            other => Err(IfrError::InvalidInput(format!("unknown tuning mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub n_directions: usize,
    /// Candidate bandwidths; `None` uses [`default_bandwidth_grid`] of each
    /// direction's projections.
    pub bandwidths: Option<Vec<f64>>,
    /// Candidate bin counts; `None` uses [`default_bin_grid`].
    pub bins: Option<Vec<usize>>,
    pub kernel: KernelFamily,
    pub tuning: Tuning,
    pub bin_loss: BinLoss,
    pub refine: bool,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            n_directions: 500,
            bandwidths: None,
            bins: None,
            kernel: KernelFamily::Epanechnikov,
            tuning: Tuning::Cached,
            bin_loss: BinLoss::Members,
            refine: true,
            seed: 0,
        }
    }
}

/// `{⌈n^0.2⌉, ⌈n^0.25⌉, ⌈n^0.3⌉}` without duplicates.
pub fn default_bin_grid(n: usize) -> Vec<usize> {
    let mut g: Vec<usize> = [0.2, 0.25, 0.3]
        .iter()
        .map(|e| ((n as f64).powf(*e).ceil() as usize).max(1))
        .collect();
    g.dedup();
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStage {
    Grid,
    Refine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchEntry {
    /// Full unit direction as evaluated.
    pub direction: Vec<f64>,
    pub criterion: f64,
    pub bandwidth: f64,
    pub bins: usize,
    pub stage: SearchStage,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SearchLog {
    pub entries: Vec<SearchEntry>,
    /// Every evaluated direction had criterion exactly zero.
    pub zero_variance: bool,
    /// Directions whose criterion could not be computed.
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IfrFit {
    pub direction: DirectionParam,
    pub bandwidth: f64,
    /// Requested bin count `M*`; `binned.len()` is the effective count.
    pub bins: usize,
    pub kernel: KernelFamily,
    pub bin_loss: BinLoss,
    pub criterion: f64,
    pub binned: BinnedSample,
    /// Local linear fits at the representatives' projections.
    pub fitted: Vec<ObjectValue>,
    pub search_log: SearchLog,
}

/// Estimates the index direction by minimizing `V_n` over random unit
/// directions, optionally polishing the best one.
pub fn fit_ifr(sample: &Sample, config: &FitConfig) -> Result<IfrFit> {
    let directions = sample_directions(sample.p(), config.n_directions.max(1), config.seed);
    fit_ifr_on(sample, &directions, config)
}

/// [`fit_ifr`] over a caller-supplied direction grid.
pub fn fit_ifr_on(sample: &Sample, directions: &[DirectionParam], config: &FitConfig) -> Result<IfrFit> {
    if sample.n() < 10 {
        return Err(IfrError::InvalidInput(format!("fit needs n >= 10, got {}", sample.n())));
    }
    if sample.p() < 2 {
        return Err(IfrError::InvalidInput("fit needs p >= 2 predictors".into()));
    }
    if directions.is_empty() {
        return Err(IfrError::InvalidInput("empty direction grid".into()));
    }
    let bin_grid = match &config.bins {
        Some(g) if g.is_empty() || g.contains(&0) => {
            return Err(IfrError::InvalidInput("bin grid must be nonempty and positive".into()))
        }
        Some(g) => g.clone(),
        None => default_bin_grid(sample.n()),
    };
    if let Some(b) = &config.bandwidths {
        if b.is_empty() || b.iter().any(|v| !(*v > 0.0)) {
            return Err(IfrError::InvalidInput(
                "bandwidth grid must be nonempty and positive".into(),
            ));
        }
    }
    let search = Search {
        sample,
        config,
        bin_grid,
    };

    let mut entries = match config.tuning {
        Tuning::Fixed { bandwidth, bins } => search.grid_pass(directions, |_| Some((bandwidth, bins))),
        Tuning::PerDirection => search.grid_pass(directions, |d| search.tune(d).ok()),
        Tuning::Cached => search.cached(directions),
    };
    let mut best =
        argmin(&entries).ok_or_else(|| IfrError::FitFailure("no direction had a finite criterion".into()))?;

    if config.refine && sample.p() >= 2 {
        let (b, m) = (entries[best].bandwidth, entries[best].bins);
        let start = entries[best].clone();
        let polished = search.refine(&start, b, m);
        entries.extend(polished);
        best = argmin(&entries).expect("grid pass had a finite entry");
    }

    let winner = &entries[best];
    let direction = DirectionParam::from_full(winner.direction.clone())?;
    let eval = evaluate_direction(
        sample,
        direction.full(),
        winner.bandwidth,
        winner.bins,
        config.kernel,
        config.bin_loss,
    )?;
    let failed = entries.iter().filter(|e| !e.criterion.is_finite()).count();
    let zero_variance = entries.iter().all(|e| e.criterion == 0.0);
    Ok(IfrFit {
        direction,
        bandwidth: winner.bandwidth,
        bins: winner.bins,
        kernel: config.kernel,
        bin_loss: config.bin_loss,
        criterion: eval.criterion,
        binned: eval.bins,
        fitted: eval.fitted,
        search_log: SearchLog {
            entries,
            zero_variance,
            failed,
        },
    })
}

/// Lowest finite criterion, ties to the earliest entry.
fn argmin(entries: &[SearchEntry]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, e) in entries.iter().enumerate() {
        if e.criterion.is_finite() && best.is_none_or(|b| e.criterion < entries[b].criterion) {
            best = Some(i);
        }
    }
    best
}

struct Search<'a> {
    sample: &'a Sample,
    config: &'a FitConfig,
    bin_grid: Vec<usize>,
}

impl Search<'_> {
    fn evaluate(&self, direction: &[f64], bandwidth: f64, bins: usize, stage: SearchStage) -> SearchEntry {
        let criterion = criterion_vn(
            self.sample,
            direction,
            bandwidth,
            bins,
            self.config.kernel,
            self.config.bin_loss,
        );
        SearchEntry {
            direction: direction.to_vec(),
            criterion,
            bandwidth,
            bins,
            stage,
        }
    }

    fn grid_pass<F>(&self, directions: &[DirectionParam], tuning: F) -> Vec<SearchEntry>
    where
        F: Fn(&DirectionParam) -> Option<(f64, usize)> + Sync,
    {
        directions
            .par_iter()
            .map(|d| match tuning(d) {
                Some((b, m)) => self.evaluate(d.full(), b, m, SearchStage::Grid),
                None => SearchEntry {
                    direction: d.full().to_vec(),
                    criterion: f64::INFINITY,
                    bandwidth: f64::NAN,
                    bins: 0,
                    stage: SearchStage::Grid,
                },
            })
            .collect()
    }

    /// Cross-validated `(b*, M*)` at one direction.
    fn tune(&self, direction: &DirectionParam) -> Result<(f64, usize)> {
        let proj = self.sample.project(direction.full())?;
        let grid = match &self.config.bandwidths {
            Some(g) => g.clone(),
            None => default_bandwidth_grid(&proj)?,
        };
        let b = cv_bandwidth(
            self.sample.responses(),
            &proj,
            &grid,
            default_folds(self.sample.n()),
            self.config.kernel,
            self.sample.kind(),
        )?;
        let m = cv_bins(
            self.sample,
            direction.full(),
            b,
            self.config.kernel,
            &self.bin_grid,
            self.config.bin_loss,
        )?;
        Ok((b, m))
    }

    fn pilot(&self, direction: &DirectionParam) -> Option<(f64, usize)> {
        let b = match &self.config.bandwidths {
            Some(g) => {
                let mut s = g.clone();
                s.sort_by(f64::total_cmp);
                s[(s.len() - 1) / 2]
            }
            // geometric centre of the default grid
            None => projection_range(&self.sample.project(direction.full()).ok()?).ok()? / 40f64.sqrt(),
        };
        Some((b, self.bin_grid[(self.bin_grid.len() - 1) / 2]))
    }

    fn cached(&self, directions: &[DirectionParam]) -> Vec<SearchEntry> {
        let pilot = self.grid_pass(directions, |d| self.pilot(d));
        let Some(mut at) = argmin(&pilot) else { return pilot };
        let mut tuned: Option<(f64, usize)> = None;
        let mut entries = pilot;
        for _ in 0..CACHED_ROUNDS {
            let Ok(bm) = self.tune(&directions[at]) else { break };
            if tuned == Some(bm) {
                break;
            }
            tuned = Some(bm);
            entries = self.grid_pass(directions, |_| Some(bm));
            match argmin(&entries) {
                Some(next) if next != at => at = next,
                _ => break,
            }
        }
        entries
    }

    /// Coordinate-wise golden-section search in the reduced ball around
    /// `start`, at most [`REFINE_BUDGET`] evaluations.
    fn refine(&self, start: &SearchEntry, bandwidth: f64, bins: usize) -> Vec<SearchEntry> {
        let Ok(start_dir) = DirectionParam::from_full(start.direction.clone()) else {
            return Vec::new();
        };
        let k = start_dir.p() - 1;
        let mut theta = start_dir.reduced().to_vec();
        let mut best = start.criterion;
        let mut log = Vec::new();
        let per_coord = (REFINE_BUDGET / (REFINE_WIDTHS.len() * k)).max(3);

        let eval_at = |theta: &[f64], log: &mut Vec<SearchEntry>| -> f64 {
            match DirectionParam::lift(theta) {
                Ok(d) => {
                    let e = self.evaluate(d.full(), bandwidth, bins, SearchStage::Refine);
                    let c = e.criterion;
                    log.push(e);
                    c
                }
                Err(_) => f64::INFINITY,
            }
        };

        'outer: for width in REFINE_WIDTHS {
            for r in 0..k {
                if log.len() + 2 > REFINE_BUDGET {
                    break 'outer;
                }
                let others: f64 = theta
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != r)
                    .map(|(_, v)| v * v)
                    .sum();
                let limit = ((1.0 - others).max(0.0)).sqrt() * (1.0 - BALL_MARGIN);
                let (mut a, mut b) = ((theta[r] - width).max(-limit), (theta[r] + width).min(limit));
                if !(b > a) {
                    continue;
                }
                let mut probe = theta.clone();
                let mut f_at = |x: f64, log: &mut Vec<SearchEntry>| {
                    probe[r] = x;
                    (eval_at(&probe, log), x)
                };
                let mut c = b - GOLDEN * (b - a);
                let mut d = a + GOLDEN * (b - a);
                let (mut fc, _) = f_at(c, &mut log);
                let (mut fd, _) = f_at(d, &mut log);
                let mut local = if fc <= fd { (fc, c) } else { (fd, d) };
                let mut used = 2;
                while used < per_coord && log.len() < REFINE_BUDGET {
                    if fc <= fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - GOLDEN * (b - a);
                        fc = f_at(c, &mut log).0;
                        if fc < local.0 {
                            local = (fc, c);
                        }
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + GOLDEN * (b - a);
                        fd = f_at(d, &mut log).0;
                        if fd < local.0 {
                            local = (fd, d);
                        }
                    }
                    used += 1;
                }
                if local.0 < best {
                    best = local.0;
                    theta[r] = local.1;
                }
            }
        }
        log
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_grid_defaults() {
        assert_eq!(default_bin_grid(100), vec![3, 4]);
        assert_eq!(default_bin_grid(200), vec![3, 4, 5]);
        assert_eq!(default_bin_grid(1000), vec![4, 6, 8]);
    }
}
