//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn epanechnikov(u: f64) -> f64 {
    if u.abs() < 1.0 {
        0.75 * (1.0 - u * u)
    } else {
        0.0
    }
}

/// Classical local linear regression at `t`: weighted least squares of `y`
/// on `(1, x − t)` with weights `K((x − t)/b)`, returning the intercept.
pub fn local_linear_wls(x: &[f64], y: &[f64], t: f64, b: f64) -> f64 {
    let (mut s0, mut s1, mut s2, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let d = xi - t;
        let w = epanechnikov(d / b);
        s0 += w;
        s1 += w * d;
        s2 += w * d * d;
        r0 += w * yi;
        r1 += w * d * yi;
    }
    // Cramer's rule on [[s0, s1], [s1, s2]] (a, c)ᵀ = (r0, r1)ᵀ.
    (s2 * r0 - s1 * r1) / (s0 * s2 - s1 * s1)
}

/// Brute-force minimizer of `Σₖ ωₖ Σᵢ wᵢ (qᵢₖ − vₖ)²` over nondecreasing
/// sequences `v` taking values on an equispaced lattice over `[lo, hi]`,
/// by dynamic programming over (grid point, lattice level).
pub fn monotone_lattice_minimizer(
    curves: &[Vec<f64>],
    weights: &[f64],
    quad: &[f64],
    lo: f64,
    hi: f64,
    levels: usize,
) -> Vec<f64> {
    let k = quad.len();
    let step = (hi - lo) / (levels - 1) as f64;
    let level = |j: usize| lo + step * j as f64;
    let cost_at = |pos: usize, j: usize| -> f64 {
        let v = level(j);
        quad[pos]
            * curves
                .iter()
                .zip(weights)
                .map(|(c, w)| w * (c[pos] - v).powi(2))
                .sum::<f64>()
    };
    // best[j] = minimal cost of a prefix ending at level ≤ j; arg stores the choice
    let mut table = vec![vec![0.0; levels]; k];
    let mut choice = vec![vec![0usize; levels]; k];
    for pos in 0..k {
        let mut running = f64::INFINITY;
        let mut running_arg = 0;
        for j in 0..levels {
            let here = cost_at(pos, j) + if pos == 0 { 0.0 } else { table[pos - 1][j] };
            if here < running {
                running = here;
                running_arg = j;
            }
            table[pos][j] = running;
            choice[pos][j] = running_arg;
        }
    }
    let mut out = vec![0.0; k];
    let mut j = levels - 1;
    for pos in (0..k).rev() {
        let pick = choice[pos][j];
        out[pos] = level(pick);
        j = pick;
    }
    out
}

/// A random nondecreasing sequence of length `k` starting near 0.
pub fn random_monotone(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = rng.random_range(-1.0..1.0);
    (0..k)
        .map(|_| {
            v += rng.random_range(0.0..0.3);
            v
        })
        .collect()
}

pub fn ols(x: &nalgebra::DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    let n = x.nrows();
    let design = nalgebra::DMatrix::from_fn(n, x.ncols() + 1, |i, j| if j == 0 { 1.0 } else { x[(i, j - 1)] });
    let yv = nalgebra::DVector::from_column_slice(y);
    let beta = (design.transpose() * &design).try_inverse().unwrap() * design.transpose() * yv;
    beta.iter().copied().collect()
}
