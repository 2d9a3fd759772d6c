//! Thin helpers over nalgebra for the small dense symmetric problems used
//! throughout (p ≤ a few dozen).

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{IfrError, Result};

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// 2-norm condition number of a symmetric matrix (∞ when singular).
pub fn sym_condition(m: &DMatrix<f64>) -> f64 {
    let ev = sym_eigenvalues(m);
    let max = ev.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let min = ev.iter().fold(f64::INFINITY, |a, &v| a.min(v.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse of a general square matrix, rejected when the condition number
/// (via singular values) exceeds `max_condition`.
pub fn checked_inverse(m: &DMatrix<f64>, max_condition: f64) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(IfrError::Dimension(format!(
            "expected square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(IfrError::InvalidInput("matrix has non-finite entries".into()));
    }
    let cond = condition_number(m);
    if !(cond < max_condition) {
        return Err(IfrError::SingularMatrix(format!("condition number {cond:.3e}")));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| IfrError::SingularMatrix("inversion failed".into()))
}

pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(0.0_f64, |a, &v| a.max(v));
    let min = sv.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn matrix_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(0.0_f64, |a, &v| a.max(v));
    let tol = max * (m.nrows().max(m.ncols()) as f64) * f64::EPSILON;
    sv.iter().filter(|&&v| v > tol).count()
}

/// Sample mean and covariance (divisor n) of the rows of `x`.
pub fn mean_and_covariance(x: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = x.nrows() as f64;
    let mean = x.row_mean().transpose();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let cov = centered.transpose() * &centered / n;
    (mean, cov)
}
