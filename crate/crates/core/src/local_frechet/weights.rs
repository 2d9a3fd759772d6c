use super::kernel::KernelSpec;
use crate::error::{IfrError, Result};

const SIGMA0_FLOOR: f64 = 1e-12;

/// Empirical local linear weights at a target index value.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalWeights {
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub sigma0_sq: f64,
    /// `Ŝᵢ`; these average to one over the sample.
    pub s: Vec<f64>,
}

impl LocalWeights {
    /// Weights normalized to sum to one, i.e. `Ŝᵢ / Σⱼ Ŝⱼ`.
    pub fn normalized(&self) -> Vec<f64> {
        let total: f64 = self.s.iter().sum();
        self.s.iter().map(|v| v / total).collect()
    }
}

/// Kernel moments `μ̂ₗ = (1/n)Σ K_b(tᵢ−t)(tᵢ−t)ˡ` and the weights
/// `Ŝᵢ = K_b(tᵢ−t)[μ̂₂ − μ̂₁(tᵢ−t)]/σ̂₀²` with `σ̂₀² = μ̂₂μ̂₀ − μ̂₁²`.
pub fn empirical_weights(projections: &[f64], t: f64, kernel: &KernelSpec) -> Result<LocalWeights> {
    let n = projections.len();
    if n < 2 {
        return Err(IfrError::InvalidInput(format!("local weights need n >= 2, got {n}")));
    }
    if !t.is_finite() || projections.iter().any(|v| !v.is_finite()) {
        return Err(IfrError::InvalidInput("non-finite projection".into()));
    }
    let b = kernel.bandwidth();
    let mut k = Vec::with_capacity(n);
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for &ti in projections {
        let d = ti - t;
        let kv = kernel.eval(d);
        m0 += kv;
        m1 += kv * d;
        m2 += kv * d * d;
        k.push(kv);
    }
    let nf = n as f64;
    let (mu0, mu1, mu2) = (m0 / nf, m1 / nf, m2 / nf);
    let sigma0_sq = mu2 * mu0 - mu1 * mu1;
    if mu0 > 0.0 && mu1 == 0.0 && mu2 == 0.0 {
        // Every observation with kernel mass sits exactly at t: the slope is
        // unidentified but irrelevant, and the weights reduce to K/μ̂₀.
        let s = k.iter().map(|kv| kv / mu0).collect();
        return Ok(LocalWeights {
            mu0,
            mu1,
            mu2,
            sigma0_sq,
            s,
        });
    }
    if !(sigma0_sq > SIGMA0_FLOOR) {
        return Err(IfrError::InsufficientLocalData { t, bandwidth: b });
    }
    let s = projections
        .iter()
        .zip(&k)
        .map(|(&ti, &kv)| {
            if kv == 0.0 {
                0.0
            } else {
                kv * (mu2 - mu1 * (ti - t)) / sigma0_sq
            }
        })
        .collect();
    Ok(LocalWeights {
        mu0,
        mu1,
        mu2,
        sigma0_sq,
        s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_pair() {
        let k = KernelSpec::epanechnikov(2.0).unwrap();
        let w = empirical_weights(&[-1.0, 1.0], 0.0, &k).unwrap();
        // K_2(±1) = 0.75·(1 − 0.25)/2 = 0.28125; μ̂₁ = 0; Ŝ = K·μ̂₂/(μ̂₂μ̂₀) = K/μ̂₀.
        assert_eq!(w.mu1, 0.0);
        assert!((w.mu0 - 0.28125).abs() < 1e-15);
        for s in &w.s {
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn all_projections_at_target() {
        let k = KernelSpec::epanechnikov(1.0).unwrap();
        let w = empirical_weights(&[0.25; 4], 0.25, &k).unwrap();
        assert_eq!(w.s, vec![1.0; 4]);
    }

    #[test]
    fn one_distinct_projection_off_target_is_insufficient() {
        let k = KernelSpec::epanechnikov(1.0).unwrap();
        let err = empirical_weights(&[0.5, 0.5, 0.5], 0.0, &k).unwrap_err();
        assert_eq!(err, IfrError::InsufficientLocalData { t: 0.0, bandwidth: 1.0 });
    }

    #[test]
    fn empty_window_is_insufficient() {
        let k = KernelSpec::epanechnikov(0.1).unwrap();
        assert!(empirical_weights(&[0.0, 1.0, 2.0], 0.5, &k).is_err());
    }
}
