use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{IfrError, Result};
use crate::linalg::sym_eigenvalues;

pub const MONOTONE_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-8;
pub const UNIT_NORM_TOL: f64 = 1e-10;

/// The metric a dataset is analysed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricSpaceKind {
    /// Univariate distributions as quantile functions, 2-Wasserstein metric.
    Wasserstein2,
    /// Symmetric matrices with the Frobenius metric.
    Frobenius,
    /// Unit sphere with the geodesic (great-circle) metric.
    SphereGeodesic,
    Euclidean,
}

impl MetricSpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricSpaceKind::Wasserstein2 => "wasserstein",
            MetricSpaceKind::Frobenius => "frobenius",
            MetricSpaceKind::SphereGeodesic => "sphere",
            MetricSpaceKind::Euclidean => "euclidean",
        }
    }
}

impl std::str::FromStr for MetricSpaceKind {
    type Err = IfrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wasserstein" | "wasserstein2" => Ok(MetricSpaceKind::Wasserstein2),
            "frobenius" => Ok(MetricSpaceKind::Frobenius),
            "sphere" | "geodesic" => Ok(MetricSpaceKind::SphereGeodesic),
            "euclidean" => Ok(MetricSpaceKind::Euclidean),
            other => Err(IfrError::InvalidInput(format!("unknown metric '{other}'"))),
        }
    }
}

/// Probability grid shared by every quantile function of a dataset, together
/// with its trapezoid quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbGrid {
    probs: Vec<f64>,
    quad: Vec<f64>,
}

impl ProbGrid {
    pub fn new(probs: Vec<f64>) -> Result<Arc<Self>> {
        if probs.len() < 2 {
            return Err(IfrError::InvalidInput(
                "probability grid needs at least 2 points".into(),
            ));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0) {
            return Err(IfrError::InvalidInput("probabilities must lie in [0, 1]".into()));
        }
        if probs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(IfrError::InvalidInput(
                "probability grid must be strictly increasing".into(),
            ));
        }
        let k = probs.len();
        let mut quad = vec![0.0; k];
        for i in 0..k - 1 {
            let half = 0.5 * (probs[i + 1] - probs[i]);
            quad[i] += half;
            quad[i + 1] += half;
        }
        Ok(Arc::new(ProbGrid { probs, quad }))
    }

    /// `k` equispaced probabilities on `[lo, hi]`.
    pub fn equispaced(k: usize, lo: f64, hi: f64) -> Result<Arc<Self>> {
        if k < 2 {
            return Err(IfrError::InvalidInput(
                "probability grid needs at least 2 points".into(),
            ));
        }
        let step = (hi - lo) / (k - 1) as f64;
        let mut probs: Vec<f64> = (0..k).map(|i| lo + step * i as f64).collect();
        probs[k - 1] = hi;
        Self::new(probs)
    }

    /// 101 points on [0.005, 0.995].
    pub fn standard() -> Arc<Self> {
        Self::equispaced(101, 0.005, 0.995).expect("static grid is valid")
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn quadrature_weights(&self) -> &[f64] {
        &self.quad
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFunction {
    grid: Arc<ProbGrid>,
    values: Vec<f64>,
}

impl QuantileFunction {
    pub fn new(grid: Arc<ProbGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(IfrError::Dimension(format!(
                "quantile function has {} values for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(IfrError::InvalidInput("quantile values must be finite".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0] - MONOTONE_TOL) {
            return Err(IfrError::InvalidInput("quantile values must be nondecreasing".into()));
        }
        Ok(QuantileFunction { grid, values })
    }

    pub(crate) fn from_parts(grid: Arc<ProbGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        QuantileFunction { grid, values }
    }

    pub fn grid(&self) -> &Arc<ProbGrid> {
        &self.grid
    }

    pub fn probs(&self) -> &[f64] {
        self.grid.probs()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Admissible set a matrix object lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixConstraint {
    /// Symmetric positive semidefinite (covariance matrices).
    Psd,
    /// PSD with unit diagonal.
    Correlation,
    /// Symmetric with entries in [0, 1] (weighted adjacency matrices).
    UnitInterval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
    constraint: MatrixConstraint,
}

impl SymMatrix {
    /// Row-major `dim × dim` entries; validated against `constraint`.
    pub fn new(dim: usize, entries: Vec<f64>, constraint: MatrixConstraint) -> Result<Self> {
        let m = SymMatrix {
            dim,
            entries,
            constraint,
        };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn from_parts(dim: usize, entries: Vec<f64>, constraint: MatrixConstraint) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        SymMatrix {
            dim,
            entries,
            constraint,
        }
    }

    fn validate(&self) -> Result<()> {
        let r = self.dim;
        if r == 0 || self.entries.len() != r * r {
            return Err(IfrError::Dimension(format!(
                "matrix of dim {r} needs {} entries, got {}",
                r * r,
                self.entries.len()
            )));
        }
        if self.entries.iter().any(|v| !v.is_finite()) {
            return Err(IfrError::InvalidInput("matrix entries must be finite".into()));
        }
        for i in 0..r {
            for j in i + 1..r {
                if (self.get(i, j) - self.get(j, i)).abs() > SYMMETRY_TOL {
                    return Err(IfrError::InvalidInput(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        match self.constraint {
            MatrixConstraint::Psd | MatrixConstraint::Correlation => {
                let ev = sym_eigenvalues(&self.to_dmatrix());
                if ev[0] < -EIGEN_TOL {
                    return Err(IfrError::InvalidInput(format!(
                        "matrix is not PSD (smallest eigenvalue {:.3e})",
                        ev[0]
                    )));
                }
                if self.constraint == MatrixConstraint::Correlation
                    && (0..r).any(|i| (self.get(i, i) - 1.0).abs() > SYMMETRY_TOL)
                {
                    return Err(IfrError::InvalidInput("correlation matrix needs unit diagonal".into()));
                }
            }
            MatrixConstraint::UnitInterval => {
                if self.entries.iter().any(|&v| !(-1e-12..=1.0 + 1e-12).contains(&v)) {
                    return Err(IfrError::InvalidInput("adjacency entries must lie in [0, 1]".into()));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn constraint(&self) -> MatrixConstraint {
        self.constraint
    }

    pub fn unit_diagonal(&self) -> bool {
        self.constraint == MatrixConstraint::Correlation
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(IfrError::Dimension("sphere point needs coordinates".into()));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(IfrError::InvalidInput("sphere coordinates must be finite".into()));
        }
        let norm = coords.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(IfrError::InvalidInput(format!("sphere point has norm {norm}")));
        }
        Ok(SpherePoint { coords })
    }

    pub(crate) fn from_parts(coords: Vec<f64>) -> Self {
        SpherePoint { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanVec {
    coords: Vec<f64>,
}

impl EuclideanVec {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(IfrError::Dimension("Euclidean vector needs coordinates".into()));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(IfrError::InvalidInput("coordinates must be finite".into()));
        }
        Ok(EuclideanVec { coords })
    }

    pub fn scalar(y: f64) -> Result<Self> {
        Self::new(vec![y])
    }

    pub(crate) fn from_parts(coords: Vec<f64>) -> Self {
        EuclideanVec { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// A metric-space valued response.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectValue {
    Quantile(QuantileFunction),
    Matrix(SymMatrix),
    Sphere(SpherePoint),
    Euclidean(EuclideanVec),
}

impl ObjectValue {
    /// The metric this representation is compatible with.
    pub fn natural_kind(&self) -> MetricSpaceKind {
        match self {
            ObjectValue::Quantile(_) => MetricSpaceKind::Wasserstein2,
            ObjectValue::Matrix(_) => MetricSpaceKind::Frobenius,
            ObjectValue::Sphere(_) => MetricSpaceKind::SphereGeodesic,
            ObjectValue::Euclidean(_) => MetricSpaceKind::Euclidean,
        }
    }

    /// Flat view of the numeric payload.
    pub fn as_slice(&self) -> &[f64] {
        match self {
            ObjectValue::Quantile(q) => q.values(),
            ObjectValue::Matrix(m) => m.entries(),
            ObjectValue::Sphere(s) => s.coords(),
            ObjectValue::Euclidean(e) => e.coords(),
        }
    }

    pub fn as_quantile(&self) -> Option<&QuantileFunction> {
        match self {
            ObjectValue::Quantile(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&SymMatrix> {
        match self {
            ObjectValue::Matrix(m) => Some(m),
            _ => None,
        }
    }

    /// Scalar value of a one-dimensional Euclidean response.
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            ObjectValue::Euclidean(e) if e.coords().len() == 1 => Some(e.coords()[0]),
            _ => None,
        }
    }

    pub fn scalar(y: f64) -> Self {
        ObjectValue::Euclidean(EuclideanVec::from_parts(vec![y]))
    }

    /// Check that `self` and `other` live in the same space under `kind`.
    pub fn check_compatible(&self, other: &ObjectValue, kind: MetricSpaceKind) -> Result<()> {
        self.check_kind(kind)?;
        other.check_kind(kind)?;
        let same = match (self, other) {
            (ObjectValue::Quantile(a), ObjectValue::Quantile(b)) => {
                Arc::ptr_eq(a.grid(), b.grid()) || a.probs() == b.probs()
            }
            (ObjectValue::Matrix(a), ObjectValue::Matrix(b)) => a.dim() == b.dim(),
            (ObjectValue::Sphere(a), ObjectValue::Sphere(b)) => a.coords().len() == b.coords().len(),
            (ObjectValue::Euclidean(a), ObjectValue::Euclidean(b)) => a.coords().len() == b.coords().len(),
            _ => false,
        };
        if same {
            Ok(())
        } else {
            Err(IfrError::Dimension("objects have different shapes".into()))
        }
    }

    pub fn check_kind(&self, kind: MetricSpaceKind) -> Result<()> {
        if self.natural_kind() != kind {
            return Err(IfrError::Dimension(format!(
                "object of kind {} used under metric {}",
                self.natural_kind().name(),
                kind.name()
            )));
        }
        if self.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(IfrError::InvalidInput("object has non-finite entries".into()));
        }
        Ok(())
    }
}

impl From<QuantileFunction> for ObjectValue {
    fn from(q: QuantileFunction) -> Self {
        ObjectValue::Quantile(q)
    }
}

impl From<SymMatrix> for ObjectValue {
    fn from(m: SymMatrix) -> Self {
        ObjectValue::Matrix(m)
    }
}

impl From<SpherePoint> for ObjectValue {
    fn from(s: SpherePoint) -> Self {
        ObjectValue::Sphere(s)
    }
}

impl From<EuclideanVec> for ObjectValue {
    fn from(e: EuclideanVec) -> Self {
        ObjectValue::Euclidean(e)
    }
}
