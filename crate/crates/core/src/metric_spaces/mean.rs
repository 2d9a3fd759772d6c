use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::distance::geodesic_angle;
use super::object::{MetricSpaceKind, ObjectValue, SpherePoint};
use super::project::{normalize, project_to_space, ObjectShape};
use crate::error::{IfrError, Result};

const WEIGHT_SUM_TOL: f64 = 1e-8;
const SPHERE_TOL: f64 = 1e-10;
const SPHERE_MAX_ITER: usize = 500;
const SPHERE_RESTARTS: usize = 5;
const SPHERE_RESTART_SEED: u64 = 0x5fe2_e5ee_d000_0001;

/// Minimizer of `Σ wᵢ d²(Yᵢ, ω)` over the object space of `kind`.
///
/// Weights must sum to one but may be negative (local linear weights are).
pub fn weighted_frechet_mean(objects: &[ObjectValue], weights: &[f64], kind: MetricSpaceKind) -> Result<ObjectValue> {
    if objects.len() != weights.len() {
        return Err(IfrError::LengthMismatch {
            left: objects.len(),
            right: weights.len(),
        });
    }
    let items: Vec<(&ObjectValue, f64)> = objects.iter().zip(weights.iter().copied()).collect();
    frechet_mean_of(&items, kind)
}

/// Same as [`weighted_frechet_mean`] over borrowed (object, weight) pairs.
pub fn frechet_mean_of(items: &[(&ObjectValue, f64)], kind: MetricSpaceKind) -> Result<ObjectValue> {
    let Some(&(first, _)) = items.first() else {
        return Err(IfrError::InvalidInput("Fréchet mean of an empty set".into()));
    };
    first.check_kind(kind)?;
    let mut sum = 0.0;
    for &(obj, w) in items {
        if !w.is_finite() {
            return Err(IfrError::InvalidWeights { sum: f64::NAN });
        }
        sum += w;
        if !std::ptr::eq(obj, first) {
            first.check_compatible(obj, kind)?;
        }
    }
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(IfrError::InvalidWeights { sum });
    }

    // Identical supports (and point masses) are returned as-is.
    let mut active = items.iter().filter(|(_, w)| *w != 0.0);
    if let Some(&(lead, _)) = active.next() {
        if active.all(|(o, _)| o.as_slice() == lead.as_slice()) {
            return Ok(lead.clone());
        }
    }

    let shape = ObjectShape::of(first);
    match kind {
        MetricSpaceKind::SphereGeodesic => sphere_mean(items).map(ObjectValue::Sphere),
        _ => {
            let avg = weighted_average(items, shape.len());
            project_to_space(&avg, &shape)
        }
    }
}

fn weighted_average(items: &[(&ObjectValue, f64)], len: usize) -> Vec<f64> {
    let mut acc = vec![0.0; len];
    for &(obj, w) in items {
        if w == 0.0 {
            continue;
        }
        for (a, v) in acc.iter_mut().zip(obj.as_slice()) {
            *a += w * v;
        }
    }
    acc
}

fn sphere_objective(items: &[(&ObjectValue, f64)], omega: &[f64]) -> f64 {
    items
        .iter()
        .map(|&(o, w)| {
            let t = geodesic_angle(omega, o.as_slice());
            w * t * t
        })
        .sum()
}

/// Riemannian gradient of `Σ wᵢ θᵢ²` at ω, i.e. `−2 Σ wᵢ Log_ω(yᵢ)`.
fn sphere_gradient(items: &[(&ObjectValue, f64)], omega: &[f64]) -> Vec<f64> {
    let m = omega.len();
    let mut g = vec![0.0; m];
    for &(o, w) in items {
        if w == 0.0 {
            continue;
        }
        let y = o.as_slice();
        let c: f64 = omega.iter().zip(y).map(|(a, b)| a * b).sum();
        let mut u: Vec<f64> = y.iter().zip(omega).map(|(yi, oi)| yi - c * oi).collect();
        let un = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if un < 1e-300 {
            continue;
        }
        let theta = geodesic_angle(omega, y);
        for v in u.iter_mut() {
            *v *= theta / un;
        }
        for (gi, ui) in g.iter_mut().zip(&u) {
            *gi -= 2.0 * w * ui;
        }
    }
    g
}

fn exp_map(omega: &[f64], v: &[f64]) -> Vec<f64> {
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nv == 0.0 {
        return omega.to_vec();
    }
    let (s, c) = nv.sin_cos();
    let raw: Vec<f64> = omega.iter().zip(v).map(|(o, vi)| c * o + s * vi / nv).collect();
    normalize(&raw).unwrap_or_else(|_| omega.to_vec())
}

fn sphere_descent(items: &[(&ObjectValue, f64)], start: Vec<f64>) -> (Vec<f64>, f64) {
    let mut omega = start;
    let mut f = sphere_objective(items, &omega);
    let mut step = 0.5;
    'descent: for _ in 0..SPHERE_MAX_ITER {
        let g = sphere_gradient(items, &omega);
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn < SPHERE_TOL {
            break;
        }
        let mut accepted = false;
        let mut s = step;
        for _ in 0..60 {
            let v: Vec<f64> = g.iter().map(|gi| -s * gi).collect();
            let cand = exp_map(&omega, &v);
            let fc = sphere_objective(items, &cand);
            if fc < f {
                let moved = geodesic_angle(&cand, &omega);
                omega = cand;
                let improvement = f - fc;
                f = fc;
                accepted = true;
                step = (s * 2.0).min(0.5);
                if moved < SPHERE_TOL || improvement <= SPHERE_TOL * SPHERE_TOL * f.abs().max(1.0) {
                    break 'descent;
                }
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let omega = polish(items, omega);
    let f = sphere_objective(items, &omega);
    (omega, f)
}

/// Fixed-point steps `ω ← Exp_ω(−g/2)` while the gradient norm keeps
/// shrinking. Near the minimum the objective is flat to rounding, so
/// comparing objective values alone stops about `√ε` away from it.
fn polish(items: &[(&ObjectValue, f64)], mut omega: Vec<f64>) -> Vec<f64> {
    let norm = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut g = sphere_gradient(items, &omega);
    let mut gn = norm(&g);
    for _ in 0..SPHERE_MAX_ITER {
        if gn == 0.0 {
            break;
        }
        let v: Vec<f64> = g.iter().map(|gi| -0.5 * gi).collect();
        let cand = exp_map(&omega, &v);
        let gc = sphere_gradient(items, &cand);
        let gcn = norm(&gc);
        if !(gcn < gn) {
            break;
        }
        omega = cand;
        g = gc;
        gn = gcn;
    }
    omega
}

fn sphere_mean(items: &[(&ObjectValue, f64)]) -> Result<SpherePoint> {
    let m = items[0].0.as_slice().len();
    let avg = weighted_average(items, m);
    let norm = avg.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(IfrError::DegenerateMean(format!(
            "weighted Euclidean average has norm {norm:.3e}"
        )));
    }
    let start: Vec<f64> = avg.iter().map(|v| v / norm).collect();
    let (mut best, mut best_f) = sphere_descent(items, start);

    if items.iter().any(|(_, w)| *w < 0.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(SPHERE_RESTART_SEED);
        for _ in 0..SPHERE_RESTARTS {
            let raw: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
            let Ok(start) = normalize(&raw) else { continue };
            let (cand, f) = sphere_descent(items, start);
            if f < best_f {
                best = cand;
                best_f = f;
            }
        }
    }
    Ok(SpherePoint::from_parts(best))
}
