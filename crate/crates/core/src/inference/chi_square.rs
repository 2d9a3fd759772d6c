//! Central and noncentral χ² tail probabilities and quantiles.

use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

const SERIES_TOL: f64 = 1e-12;

/// `P(χ²_df > x)`.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    gamma_ur(0.5 * df, 0.5 * x)
}

/// `P(χ²_df ≤ x)`.
pub fn chi2_cdf(x: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    gamma_lr(0.5 * df, 0.5 * x)
}

/// The `prob` quantile of `χ²_df`, found by bracketing and bisection.
pub fn chi2_quantile(prob: f64, df: f64) -> f64 {
    assert!((0.0..=1.0).contains(&prob), "probability out of range");
    if prob == 0.0 {
        return 0.0;
    }
    if prob == 1.0 {
        return f64::INFINITY;
    }
    // Work in whichever tail is smaller to keep relative accuracy.
    let upper = prob > 0.5;
    let target = if upper { 1.0 - prob } else { prob };
    let below = |x: f64| {
        if upper {
            chi2_sf(x, df) > target
        } else {
            chi2_cdf(x, df) < target
        }
    };
    let mut hi = df.max(1.0);
    while below(hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `P(χ²_df(λ) > x)` as a Poisson(λ/2) mixture of central tails, summed
/// outward from the mode until the omitted Poisson mass is below 1e-12.
pub fn noncentral_chi2_sf(x: f64, df: f64, lambda: f64) -> f64 {
    assert!(lambda >= 0.0, "noncentrality must be nonnegative");
    if lambda == 0.0 {
        return chi2_sf(x, df);
    }
    if x <= 0.0 {
        return 1.0;
    }
    let half = 0.5 * lambda;
    let log_pois = |j: f64| -half + j * half.ln() - ln_gamma(j + 1.0);
    let mode = half.floor();
    let mut mass = 0.0;
    let mut total = 0.0;
    let mut j = mode;
    loop {
        let w = log_pois(j).exp();
        mass += w;
        total += w * chi2_sf(x, df + 2.0 * j);
        if j == 0.0 || (w < SERIES_TOL * 1e-3 && mass > 0.5) {
            break;
        }
        j -= 1.0;
    }
    let mut j = mode + 1.0;
    while 1.0 - mass > SERIES_TOL {
        let w = log_pois(j).exp();
        mass += w;
        total += w * chi2_sf(x, df + 2.0 * j);
        if w == 0.0 && j > half {
            break;
        }
        j += 1.0;
    }
    total.clamp(0.0, 1.0)
}
