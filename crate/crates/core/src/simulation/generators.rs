use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp, Normal, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal as StatNormal};

use crate::error::{IfrError, Result};
use crate::metric_spaces::{EuclideanVec, MatrixConstraint, ProbGrid, QuantileFunction, SymMatrix};

const MAX_REJECTIONS: usize = 1_000_000;
const SETTING2_SIGMA: f64 = 0.1;
/// Standard deviation of the location parameter `μ` (variance 0.25).
const MU_SD: f64 = 0.5;

/// Link functions `ζ` for the simulated index models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Identity,
    Square,
    Exponential,
    Expit,
}

impl Link {
    pub fn apply(self, t: f64) -> f64 {
        match self {
            Link::Identity => t,
            Link::Square => t * t,
            Link::Exponential => t.exp(),
            Link::Expit => expit(t),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Link::Identity => "identity",
            Link::Square => "square",
            Link::Exponential => "exponential",
            Link::Expit => "expit",
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Link {
    type Err = IfrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "identity" => Ok(Link::Identity),
            "square" => Ok(Link::Square),
            "exponential" | "exp" => Ok(Link::Exponential),
            "expit" => Ok(Link::Expit),
            other => Err(IfrError::InvalidInput(format!("unknown link '{other}'"))),
        }
    }
}

pub fn expit(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn std_normal() -> StatNormal {
    StatNormal::standard()
}

/// Gaussian-copula predictors `Xⱼ = 2Φ(Zⱼ) − 1` with equicorrelated `Z`.
pub fn gen_predictors<R: Rng + ?Sized>(n: usize, p: usize, rho: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    let lower = if p > 1 { -1.0 / (p - 1) as f64 } else { -1.0 };
    if !(rho > lower && rho < 1.0) {
        return Err(IfrError::Covariance(format!(
            "equicorrelation {rho} is not valid for p = {p}"
        )));
    }
    let cov = DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { rho });
    let z = gaussian_rows(n, &cov, rng)?;
    let phi = std_normal();
    Ok(z.map(|v| 2.0 * phi.cdf(v) - 1.0))
}

fn gaussian_rows<R: Rng + ?Sized>(n: usize, cov: &DMatrix<f64>, rng: &mut R) -> Result<DMatrix<f64>> {
    let p = cov.nrows();
    let chol =
        Cholesky::new(cov.clone()).ok_or_else(|| IfrError::Covariance("covariance is not positive definite".into()))?;
    let l = chol.l();
    let mut out = DMatrix::zeros(n, p);
    for i in 0..n {
        let z = DVector::from_iterator(p, (0..p).map(|_| StandardNormal.sample(rng)));
        out.row_mut(i).copy_from(&(&l * z).transpose());
    }
    Ok(out)
}

/// Mean-zero multivariate normal rows, each redrawn until every coordinate
/// lies in `[−bound, bound]`.
pub fn gen_truncated_mvn<R: Rng + ?Sized>(
    n: usize,
    cov: &DMatrix<f64>,
    bound: f64,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let p = cov.nrows();
    let chol =
        Cholesky::new(cov.clone()).ok_or_else(|| IfrError::Covariance("covariance is not positive definite".into()))?;
    let l = chol.l();
    let mut out = DMatrix::zeros(n, p);
    for i in 0..n {
        let mut tries = 0;
        loop {
            let z = DVector::from_iterator(p, (0..p).map(|_| StandardNormal.sample(rng)));
            let x = &l * z;
            if x.iter().all(|v| v.abs() <= bound) {
                out.row_mut(i).copy_from(&x.transpose());
                break;
            }
            tries += 1;
            if tries >= MAX_REJECTIONS {
                return Err(IfrError::Covariance("truncation region has negligible mass".into()));
            }
        }
    }
    Ok(out)
}

/// Covariance of the network-response predictors: variances 0.25,
/// correlations 0.3 among the first three and −0.4 between the fourth and
/// each of the first two. Coordinates beyond the fourth are independent.
pub fn adjacency_predictor_cov(p: usize) -> DMatrix<f64> {
    let cor = |i: usize, j: usize| match (i.min(j), i.max(j)) {
        (a, b) if a == b => 1.0,
        (0, 1) | (0, 2) | (1, 2) => 0.3,
        (0, 3) | (1, 3) => -0.4,
        _ => 0.0,
    };
    DMatrix::from_fn(p, p, |i, j| 0.25 * cor(i, j))
}

/// Covariance of the Euclidean-response predictors: variances 0.1,
/// correlation 0.5 between the first and each of the second and third, 0.25
/// between the second and third, independent otherwise.
pub fn euclidean_predictor_cov(p: usize) -> DMatrix<f64> {
    let cor = |i: usize, j: usize| match (i.min(j), i.max(j)) {
        (a, b) if a == b => 1.0,
        (0, 1) | (0, 2) => 0.5,
        (1, 2) => 0.25,
        _ => 0.0,
    };
    DMatrix::from_fn(p, p, |i, j| 0.1 * cor(i, j))
}

/// `Q(s) = μ + σΦ⁻¹(s)` with `μ ~ N(ζ(t), 0.25)` and `σ` exponential with
/// mean `expit(t)`.
pub fn gen_response_setting1<R: Rng + ?Sized>(
    t: f64,
    link: Link,
    grid: &Arc<ProbGrid>,
    rng: &mut R,
) -> QuantileFunction {
    let mu = Normal::new(link.apply(t), MU_SD).expect("valid sd").sample(rng);
    let sigma = Exp::new(1.0 / expit(t)).expect("positive rate").sample(rng);
    let phi = std_normal();
    let values = grid.probs().iter().map(|&s| mu + sigma * phi.inverse_cdf(s)).collect();
    QuantileFunction::new(grid.clone(), values).expect("location-scale family is monotone")
}

/// Transport map `T_k(a) = a − sin(ka)/|k|`.
pub fn transport(k: i32, a: f64) -> f64 {
    a - (k as f64 * a).sin() / k.abs() as f64
}

/// `T_k` applied to `μ + 0.1Φ⁻¹(s)` with `μ ~ N(ζ(t), 0.25)` and `k`
/// uniform on `{±1, ±2, ±3}`.
pub fn gen_response_setting2<R: Rng + ?Sized>(
    t: f64,
    link: Link,
    grid: &Arc<ProbGrid>,
    rng: &mut R,
) -> QuantileFunction {
    let mu = Normal::new(link.apply(t), MU_SD).expect("valid sd").sample(rng);
    let k = [-3, -2, -1, 1, 2, 3][rng.random_range(0..6)];
    let phi = std_normal();
    let mut values: Vec<f64> = grid
        .probs()
        .iter()
        .map(|&s| transport(k, mu + SETTING2_SIGMA * phi.inverse_cdf(s)))
        .collect();
    // T_k is nondecreasing but its flat points can reorder by one ulp.
    for i in 1..values.len() {
        if values[i] < values[i - 1] {
            values[i] = values[i - 1];
        }
    }
    QuantileFunction::new(grid.clone(), values).expect("monotone after transport")
}

/// Bounds of the uniform error for a given `ζ`.
pub fn adjacency_error_bounds(zeta: f64) -> (f64, f64) {
    ((-zeta).max(0.0), (1.0 - zeta).min(1.0))
}

/// `ζ(t)I + ε` with `ζ = expit(t)` and symmetric uniform errors on
/// `[max(0, −ζ), min(1, 1 − ζ)]`.
pub fn gen_response_adjacency<R: Rng + ?Sized>(t: f64, m: usize, rng: &mut R) -> SymMatrix {
    let zeta = expit(t);
    let (lo, hi) = adjacency_error_bounds(zeta);
    let mut entries = vec![0.0; m * m];
    for q in 0..m {
        for r in q..m {
            let e = lo + (hi - lo) * rng.random::<f64>();
            let v = (if q == r { zeta } else { 0.0 } + e).clamp(0.0, 1.0);
            entries[q * m + r] = v;
            entries[r * m + q] = v;
        }
    }
    SymMatrix::new(m, entries, MatrixConstraint::UnitInterval).expect("entries lie in [0, 1]")
}

/// `ζ(t) + N(0, sd²)`.
pub fn gen_response_euclidean<R: Rng + ?Sized>(t: f64, link: Link, sd: f64, rng: &mut R) -> EuclideanVec {
    let z: f64 = if sd > 0.0 { StandardNormal.sample(rng) } else { 0.0 };
    let noise = sd * z;
    EuclideanVec::from_parts(vec![link.apply(t) + noise])
}
