//! Projections of unconstrained arrays back onto each object space.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use super::object::{
    EuclideanVec, MatrixConstraint, MetricSpaceKind, ObjectValue, ProbGrid, QuantileFunction, SpherePoint, SymMatrix,
    EIGEN_TOL, SYMMETRY_TOL,
};
use crate::error::{IfrError, Result};

const CORR_MAX_ITER: usize = 100;
const CORR_TOL: f64 = 1e-8;

/// Shape of an object space: everything needed to turn a raw array into an
/// [`ObjectValue`].
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectShape {
    Quantile(Arc<ProbGrid>),
    Matrix { dim: usize, constraint: MatrixConstraint },
    Sphere(usize),
    Euclidean(usize),
}

impl ObjectShape {
    pub fn of(obj: &ObjectValue) -> Self {
        match obj {
            ObjectValue::Quantile(q) => ObjectShape::Quantile(q.grid().clone()),
            ObjectValue::Matrix(m) => ObjectShape::Matrix {
                dim: m.dim(),
                constraint: m.constraint(),
            },
            ObjectValue::Sphere(s) => ObjectShape::Sphere(s.coords().len()),
            ObjectValue::Euclidean(e) => ObjectShape::Euclidean(e.coords().len()),
        }
    }

    pub fn kind(&self) -> MetricSpaceKind {
        match self {
            ObjectShape::Quantile(_) => MetricSpaceKind::Wasserstein2,
            ObjectShape::Matrix { .. } => MetricSpaceKind::Frobenius,
            ObjectShape::Sphere(_) => MetricSpaceKind::SphereGeodesic,
            ObjectShape::Euclidean(_) => MetricSpaceKind::Euclidean,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ObjectShape::Quantile(g) => g.len(),
            ObjectShape::Matrix { dim, .. } => dim * dim,
            ObjectShape::Sphere(m) | ObjectShape::Euclidean(m) => *m,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Map a raw array onto the object space described by `shape`.
///
/// Quantiles are made monotone by weighted pool-adjacent-violators (weights
/// are the grid's quadrature weights, so this is the L² projection under the
/// Wasserstein metric); matrices are symmetrized and projected onto their
/// constraint set; sphere vectors are normalized. Idempotent.
pub fn project_to_space(raw: &[f64], shape: &ObjectShape) -> Result<ObjectValue> {
    if raw.len() != shape.len() {
        return Err(IfrError::Dimension(format!(
            "raw array has {} entries, shape needs {}",
            raw.len(),
            shape.len()
        )));
    }
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(IfrError::InvalidInput("raw array has non-finite entries".into()));
    }
    Ok(match shape {
        ObjectShape::Quantile(grid) => {
            let values = isotonic_projection(raw, grid.quadrature_weights());
            ObjectValue::Quantile(QuantileFunction::from_parts(grid.clone(), values))
        }
        ObjectShape::Matrix { dim, constraint } => ObjectValue::Matrix(project_matrix(raw, *dim, *constraint)),
        ObjectShape::Sphere(_) => ObjectValue::Sphere(SpherePoint::from_parts(normalize(raw)?)),
        ObjectShape::Euclidean(_) => ObjectValue::Euclidean(EuclideanVec::from_parts(raw.to_vec())),
    })
}

/// Weighted least-squares projection onto nondecreasing sequences
/// (pool-adjacent-violators).
pub fn isotonic_projection(values: &[f64], weights: &[f64]) -> Vec<f64> {
    debug_assert_eq!(values.len(), weights.len());
    if values.windows(2).all(|w| w[0] <= w[1]) {
        return values.to_vec();
    }
    // blocks of (weighted mean, total weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        let mut cur = (v, w, 1usize);
        while let Some(&(pv, pw, pl)) = blocks.last() {
            if pv <= cur.0 {
                break;
            }
            blocks.pop();
            let tw = pw + cur.1;
            let mean = if tw > 0.0 {
                (pv * pw + cur.0 * cur.1) / tw
            } else {
                0.5 * (pv + cur.0)
            };
            cur = (mean, tw, pl + cur.2);
        }
        blocks.push(cur);
    }
    let mut out = Vec::with_capacity(values.len());
    for (mean, _, len) in blocks {
        out.extend(std::iter::repeat_n(mean, len));
    }
    out
}

pub(crate) fn normalize(raw: &[f64]) -> Result<Vec<f64>> {
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(IfrError::DegenerateInput("cannot normalize a zero vector".into()));
    }
    if (norm - 1.0).abs() <= 1e-14 {
        return Ok(raw.to_vec());
    }
    Ok(raw.iter().map(|v| v / norm).collect())
}

fn project_matrix(raw: &[f64], dim: usize, constraint: MatrixConstraint) -> SymMatrix {
    let sym = symmetrized(raw, dim);
    let entries = match constraint {
        MatrixConstraint::UnitInterval => sym.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        MatrixConstraint::Psd => {
            let m = DMatrix::from_row_slice(dim, dim, &sym);
            if is_psd(&m) {
                sym
            } else {
                row_major(&clip_psd(&m))
            }
        }
        MatrixConstraint::Correlation => nearest_correlation(&sym, dim),
    };
    SymMatrix::from_parts(dim, entries, constraint)
}

fn symmetrized(raw: &[f64], dim: usize) -> Vec<f64> {
    let mut out = raw.to_vec();
    for i in 0..dim {
        for j in i + 1..dim {
            let a = raw[i * dim + j];
            let b = raw[j * dim + i];
            if a != b {
                let avg = 0.5 * (a + b);
                out[i * dim + j] = avg;
                out[j * dim + i] = avg;
            }
        }
    }
    out
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn is_psd(m: &DMatrix<f64>) -> bool {
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let max = eig.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let min = eig.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    min >= -EIGEN_TOL * max.max(1.0)
}

/// Frobenius projection onto the PSD cone: clip negative eigenvalues.
pub(crate) fn clip_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let v = &eig.eigenvectors;
    let out = v * DMatrix::from_diagonal(&clipped) * v.transpose();
    (&out + out.transpose()) * 0.5
}

/// Alternating projections (with Dykstra's correction on the PSD step)
/// between the PSD cone and the unit-diagonal affine set.
fn nearest_correlation(sym: &[f64], dim: usize) -> Vec<f64> {
    let a = DMatrix::from_row_slice(dim, dim, sym);
    let unit_diag = (0..dim).all(|i| (a[(i, i)] - 1.0).abs() <= SYMMETRY_TOL);
    if unit_diag && is_psd(&a) {
        return sym.to_vec();
    }
    let mut y = a.clone();
    let mut correction = DMatrix::<f64>::zeros(dim, dim);
    for _ in 0..CORR_MAX_ITER {
        let r = &y - &correction;
        let x = clip_psd(&r);
        correction = &x - &r;
        let mut next = x;
        for i in 0..dim {
            next[(i, i)] = 1.0;
        }
        let change = (&next - &y).norm() / y.norm().max(1.0);
        y = next;
        if change < CORR_TOL {
            break;
        }
    }
    // Final PSD clip then diagonal rescaling keeps both constraints exactly.
    let c = clip_psd(&y);
    let scale: Vec<f64> = (0..dim)
        .map(|i| {
            let d = c[(i, i)];
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut out = vec![0.0; dim * dim];
    for i in 0..dim {
        out[i * dim + i] = 1.0;
        for j in i + 1..dim {
            let v = c[(i, j)] * scale[i] * scale[j];
            out[i * dim + j] = v;
            out[j * dim + i] = v;
        }
    }
    out
}
