use nalgebra::DMatrix;

use crate::error::{IfrError, Result};
use crate::metric_spaces::{MetricSpaceKind, ObjectValue};

/// Paired predictors (n × p) and object responses sharing one metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    predictors: DMatrix<f64>,
    responses: Vec<ObjectValue>,
    kind: MetricSpaceKind,
}

impl Sample {
    pub fn new(predictors: DMatrix<f64>, responses: Vec<ObjectValue>, kind: MetricSpaceKind) -> Result<Self> {
        if predictors.nrows() != responses.len() {
            return Err(IfrError::LengthMismatch {
                left: predictors.nrows(),
                right: responses.len(),
            });
        }
        if responses.is_empty() || predictors.ncols() == 0 {
            return Err(IfrError::InvalidInput("empty sample".into()));
        }
        if predictors.iter().any(|v| !v.is_finite()) {
            return Err(IfrError::InvalidInput("predictors contain non-finite values".into()));
        }
        let first = &responses[0];
        first.check_kind(kind)?;
        for r in &responses[1..] {
            first.check_compatible(r, kind)?;
        }
        Ok(Sample {
            predictors,
            responses,
            kind,
        })
    }

    pub fn n(&self) -> usize {
        self.responses.len()
    }

    pub fn p(&self) -> usize {
        self.predictors.ncols()
    }

    pub fn kind(&self) -> MetricSpaceKind {
        self.kind
    }

    pub fn predictors(&self) -> &DMatrix<f64> {
        &self.predictors
    }

    pub fn responses(&self) -> &[ObjectValue] {
        &self.responses
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.predictors.row(i).iter().copied().collect()
    }

    /// Index values `Xᵢᵀθ` for every observation, see [`project_rows`].
    pub fn project(&self, direction: &[f64]) -> Result<Vec<f64>> {
        project_rows(&self.predictors, direction)
    }

    /// Bootstrap-style resample: the observations at `indices`, in order.
    pub fn resample(&self, indices: &[usize]) -> Sample {
        let p = self.p();
        let predictors = DMatrix::from_fn(indices.len(), p, |r, c| self.predictors[(indices[r], c)]);
        let responses = indices.iter().map(|&i| self.responses[i].clone()).collect();
        Sample {
            predictors,
            responses,
            kind: self.kind,
        }
    }
}

/// Row-wise inner products with `direction`.
///
/// The p products of each row are summed in ascending order, so the result
/// depends only on the multiset of products: permuting predictor columns
/// together with the direction's coordinates gives bitwise-identical values.
pub fn project_rows(x: &DMatrix<f64>, direction: &[f64]) -> Result<Vec<f64>> {
    if x.ncols() != direction.len() {
        return Err(IfrError::Dimension(format!(
            "direction has {} coordinates, predictors have {}",
            direction.len(),
            x.ncols()
        )));
    }
    let mut buf = Vec::with_capacity(direction.len());
    Ok((0..x.nrows())
        .map(|i| {
            buf.clear();
            buf.extend(direction.iter().enumerate().map(|(j, d)| x[(i, j)] * d));
            canonical_sum(&mut buf)
        })
        .collect())
}

pub(crate) fn canonical_sum(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    values.iter().sum()
}
