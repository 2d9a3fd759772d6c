use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{IfrError, Result};
use crate::metric_spaces::geodesic_angle;
use crate::rng::stream_rng;

/// A unit direction `θ̄ ∈ Rᵖ` with `θ̄₁ > 0`.
///
/// The reduced form is the trailing `p − 1` coordinates; the leading one is
/// recovered as `√(1 − ‖θ‖²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionParam {
    full: Vec<f64>,
}

impl DirectionParam {
    pub fn lift(reduced: &[f64]) -> Result<Self> {
        let sq: f64 = reduced.iter().map(|v| v * v).sum();
        if !(sq < 1.0) {
            return Err(IfrError::OutOfBall { norm: sq.sqrt() });
        }
        let mut full = Vec::with_capacity(reduced.len() + 1);
        full.push((1.0 - sq).sqrt());
        full.extend_from_slice(reduced);
        Ok(DirectionParam { full })
    }

    /// Validates an already normalized full vector.
    pub fn from_full(full: Vec<f64>) -> Result<Self> {
        if full.len() < 2 || full.iter().any(|v| !v.is_finite()) {
            return Err(IfrError::InvalidInput(
                "direction needs p >= 2 finite coordinates".into(),
            ));
        }
        let norm = full.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(IfrError::InvalidInput(format!("direction has norm {norm}")));
        }
        if !(full[0] > 0.0) {
            return Err(IfrError::InvalidInput("leading coordinate must be positive".into()));
        }
        Ok(DirectionParam { full })
    }

    /// Normalizes `v`, flipping its sign if needed so the leading
    /// coordinate is positive.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || v.first().is_none_or(|&x| x == 0.0) {
            return Err(IfrError::InvalidInput(
                "direction must have a nonzero leading coordinate".into(),
            ));
        }
        let s = if v[0] > 0.0 { norm } else { -norm };
        Self::from_full(v.iter().map(|x| x / s).collect())
    }

    pub fn full(&self) -> &[f64] {
        &self.full
    }

    pub fn reduced(&self) -> &[f64] {
        &self.full[1..]
    }

    pub fn p(&self) -> usize {
        self.full.len()
    }

    /// `∂θ̄/∂θ`, a `p × (p − 1)` matrix: the first row is `−θ/θ̄₁`, the
    /// rest is the identity.
    pub fn jacobian(&self) -> DMatrix<f64> {
        let p = self.p();
        let lead = self.full[0];
        DMatrix::from_fn(p, p - 1, |r, c| {
            if r == 0 {
                -self.full[c + 1] / lead
            } else if r == c + 1 {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Great-circle angle to another direction.
    pub fn angle_to(&self, other: &DirectionParam) -> f64 {
        geodesic_angle(&self.full, &other.full)
    }
}

/// `count` directions uniform on the hemisphere `θ̄₁ > 0`.
///
/// Direction `i` is drawn from its own stream of `seed`, so the list does not
/// depend on how the work is scheduled.
pub fn sample_directions(p: usize, count: usize, seed: u64) -> Vec<DirectionParam> {
    assert!(p >= 2, "directions need p >= 2");
    (0..count)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            loop {
                let mut v: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
                v[0] = v[0].abs();
                if let Ok(d) = DirectionParam::from_vector(&v) {
                    return d;
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_examples() {
        assert_eq!(DirectionParam::lift(&[0.0, 0.0]).unwrap().full(), &[1.0, 0.0, 0.0]);
        let d = DirectionParam::lift(&[0.6]).unwrap();
        assert!((d.full()[0] - 0.8).abs() < 1e-15);
        assert_eq!(d.reduced(), &[0.6]);
        assert!(matches!(
            DirectionParam::lift(&[0.6, 0.8]),
            Err(IfrError::OutOfBall { .. })
        ));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let th = [0.3, -0.2, 0.1];
        let d = DirectionParam::lift(&th).unwrap();
        let j = d.jacobian();
        let h = 1e-7;
        for c in 0..3 {
            let mut t = th;
            t[c] += h;
            let dp = DirectionParam::lift(&t).unwrap();
            for r in 0..4 {
                let fd = (dp.full()[r] - d.full()[r]) / h;
                assert!((fd - j[(r, c)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn sampled_directions_are_valid_and_reproducible() {
        let a = sample_directions(4, 200, 7);
        assert_eq!(a, sample_directions(4, 200, 7));
        for d in &a {
            let n: f64 = d.full().iter().map(|v| v * v).sum();
            assert!((n - 1.0).abs() < 1e-12 && d.full()[0] > 0.0);
        }
    }
}
