use std::fmt;
use std::str::FromStr;

use crate::error::{IfrError, Result};

/// `2Φ(4) − 1`, the mass of a standard normal inside ±4.
const GAUSS_MASS_4SD: f64 = 0.999_936_657_516_333_8;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelFamily {
    #[default]
    Epanechnikov,
    /// Standard normal density restricted to ±4 and renormalized.
    GaussianTruncated,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::GaussianTruncated => "gaussian",
        }
    }

    /// Half-width of the support of the unit-bandwidth kernel.
    pub fn support(self) -> f64 {
        match self {
            KernelFamily::Epanechnikov => 1.0,
            KernelFamily::GaussianTruncated => 4.0,
        }
    }

    /// Unit-bandwidth density `K(u)`.
    pub fn density(self, u: f64) -> f64 {
        match self {
            KernelFamily::Epanechnikov => {
                if u.abs() < 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
            KernelFamily::GaussianTruncated => {
                if u.abs() <= 4.0 {
                    INV_SQRT_2PI * (-0.5 * u * u).exp() / GAUSS_MASS_4SD
                } else {
                    0.0
                }
            }
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = IfrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "epanechnikov" | "epan" => Ok(KernelFamily::Epanechnikov),
            "gaussian" | "gauss" | "gaussian-truncated" => Ok(KernelFamily::GaussianTruncated),
            other => Err(IfrError::InvalidInput(format!("unknown kernel '{other}'"))),
        }
    }
}

/// A kernel family together with its bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    bandwidth: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(IfrError::InvalidInput(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        Ok(KernelSpec { family, bandwidth })
    }

    pub fn epanechnikov(bandwidth: f64) -> Result<Self> {
        Self::new(KernelFamily::Epanechnikov, bandwidth)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// `K_b(d) = K(d/b)/b`.
    #[inline]
    pub fn eval(&self, d: f64) -> f64 {
        self.family.density(d / self.bandwidth) / self.bandwidth
    }
}
