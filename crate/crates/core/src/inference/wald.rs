use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::chi_square::{chi2_quantile, chi2_sf, noncentral_chi2_sf};
use crate::error::{IfrError, Result};
use crate::linalg::{checked_inverse, matrix_rank, symmetrize};

const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
}

impl TestResult {
    /// Result for an externally computed statistic.
    pub fn from_statistic(statistic: f64, df: usize, alpha: f64) -> Self {
        let p_value = chi2_sf(statistic, df as f64);
        TestResult {
            statistic,
            df,
            p_value,
            alpha,
            reject: p_value < alpha,
        }
    }
}

/// Wald test of `Bθ = ζ`: `T = (Bθ̂ − ζ)ᵀ(B(Λ/M)Bᵀ)⁻¹(Bθ̂ − ζ)`, referred to
/// `χ²_q` with `q` the number of rows of `B`.
pub fn wald_test(
    theta: &[f64],
    b: &DMatrix<f64>,
    zeta: &[f64],
    lambda: &DMatrix<f64>,
    m: usize,
    alpha: f64,
) -> Result<TestResult> {
    let (q, k) = b.shape();
    if k != theta.len() || zeta.len() != q || lambda.shape() != (k, k) {
        return Err(IfrError::Dimension(format!(
            "B is {q}x{k}, theta has {}, zeta has {}, Lambda is {}x{}",
            theta.len(),
            zeta.len(),
            lambda.nrows(),
            lambda.ncols()
        )));
    }
    if q == 0 || m == 0 {
        return Err(IfrError::InvalidInput("empty hypothesis or zero bins".into()));
    }
    let rank = matrix_rank(b);
    if rank < q {
        return Err(IfrError::RankDeficient { rows: q, rank });
    }
    let diff = b * DVector::from_column_slice(theta) - DVector::from_column_slice(zeta);
    if diff.iter().all(|v| *v == 0.0) {
        return Ok(TestResult::from_statistic(0.0, q, alpha));
    }
    let v = symmetrize(&(b * (lambda / m as f64) * b.transpose()));
    let inv = checked_inverse(&v, MAX_CONDITION)
        .map_err(|e| IfrError::SingularMatrix(format!("B(Λ/M)Bᵀ is not invertible: {e}")))?;
    let t = diff.dot(&(&inv * &diff)).max(0.0);
    Ok(TestResult::from_statistic(t, q, alpha))
}

/// Ellipsoidal confidence region `{θ : (θ̂ − θ)ᵀ(Λ/M)⁻¹(θ̂ − θ) ≤ c}` with
/// `c` the `1 − γ` quantile of `χ²_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceRegion {
    pub center: Vec<f64>,
    pub shape: DMatrix<f64>,
    pub threshold: f64,
    pub level: f64,
}

impl ConfidenceRegion {
    pub fn quadratic_form(&self, theta: &[f64]) -> f64 {
        let d = DVector::from_iterator(theta.len(), theta.iter().zip(&self.center).map(|(a, b)| a - b));
        d.dot(&(&self.shape * &d))
    }

    /// Inside the ellipsoid and the open unit ball.
    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.center.len()
            && theta.iter().map(|v| v * v).sum::<f64>() < 1.0
            && self.quadratic_form(theta) <= self.threshold
    }

    /// `points` boundary points of a two-dimensional region, counterclockwise
    /// from angle 0.
    pub fn ellipse(&self, points: usize) -> Result<Vec<[f64; 2]>> {
        if self.center.len() != 2 {
            return Err(IfrError::Dimension(format!(
                "ellipse needs a 2-D region, got {}",
                self.center.len()
            )));
        }
        let eig = SymmetricEigen::new(self.shape.clone());
        let r = self.threshold.sqrt();
        let axes: Vec<[f64; 2]> = (0..2)
            .map(|i| {
                let scale = r / eig.eigenvalues[i].sqrt();
                [eig.eigenvectors[(0, i)] * scale, eig.eigenvectors[(1, i)] * scale]
            })
            .collect();
        Ok((0..points)
            .map(|j| {
                let phi = std::f64::consts::TAU * j as f64 / points as f64;
                let (s, c) = phi.sin_cos();
                [
                    self.center[0] + c * axes[0][0] + s * axes[1][0],
                    self.center[1] + c * axes[0][1] + s * axes[1][1],
                ]
            })
            .collect())
    }
}

pub fn confidence_region(center: &[f64], lambda: &DMatrix<f64>, m: usize, gamma: f64) -> Result<ConfidenceRegion> {
    let k = center.len();
    if lambda.shape() != (k, k) || k == 0 {
        return Err(IfrError::Dimension(format!(
            "center has {k} entries, Lambda is {:?}",
            lambda.shape()
        )));
    }
    if !(gamma > 0.0 && gamma < 1.0) || m == 0 {
        return Err(IfrError::InvalidInput(format!(
            "need 0 < gamma < 1 and M > 0, got {gamma}, {m}"
        )));
    }
    let scaled = symmetrize(&(lambda / m as f64));
    let eig = SymmetricEigen::new(scaled.clone()).eigenvalues;
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    if !(lo > 0.0) || hi / lo >= MAX_CONDITION {
        return Err(IfrError::DegenerateRegion);
    }
    let shape = symmetrize(&checked_inverse(&scaled, MAX_CONDITION).map_err(|_| IfrError::DegenerateRegion)?);
    Ok(ConfidenceRegion {
        center: center.to_vec(),
        shape,
        threshold: chi2_quantile(1.0 - gamma, k as f64),
        level: 1.0 - gamma,
    })
}

/// Power of the level-`α` test of `θ₀₂ = … = θ₀p = 0` against
/// `θ_δ = (δ, …, δ)`: a noncentral `χ²_{p−1}` tail with noncentrality
/// `M θ_δᵀ Λ⁻¹ θ_δ`.
pub fn power_at(delta: f64, m: usize, p: usize, lambda: &DMatrix<f64>, alpha: f64) -> Result<f64> {
    if p < 2 || lambda.shape() != (p - 1, p - 1) {
        return Err(IfrError::Dimension(format!(
            "Lambda must be {0}x{0}",
            p.saturating_sub(1)
        )));
    }
    let inv = checked_inverse(lambda, MAX_CONDITION)
        .map_err(|e| IfrError::SingularMatrix(format!("Lambda is not invertible: {e}")))?;
    let theta = DVector::from_element(p - 1, delta);
    let rho = (m as f64 * theta.dot(&(&inv * &theta))).max(0.0);
    let df = (p - 1) as f64;
    Ok(noncentral_chi2_sf(chi2_quantile(1.0 - alpha, df), df, rho))
}
