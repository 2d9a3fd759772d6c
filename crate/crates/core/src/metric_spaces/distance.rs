use super::object::{MetricSpaceKind, ObjectValue};
use crate::error::Result;

/// Distance between two objects of the same space under `kind`.
///
/// Wasserstein-2 is the trapezoid rule for ∫ (F⁻¹ − G⁻¹)² on the shared
/// probability grid, then a square root. The sphere distance is the
/// great-circle angle.
pub fn distance(a: &ObjectValue, b: &ObjectValue, kind: MetricSpaceKind) -> Result<f64> {
    a.check_compatible(b, kind)?;
    Ok(match kind {
        MetricSpaceKind::SphereGeodesic => geodesic_angle(a.as_slice(), b.as_slice()),
        _ => dist_sq(a, b).sqrt(),
    })
}

/// Squared distance; assumes compatibility was checked by the caller.
pub(crate) fn dist_sq(a: &ObjectValue, b: &ObjectValue) -> f64 {
    match (a, b) {
        (ObjectValue::Quantile(x), ObjectValue::Quantile(y)) => x
            .grid()
            .quadrature_weights()
            .iter()
            .zip(x.values().iter().zip(y.values()))
            .map(|(w, (u, v))| w * (u - v) * (u - v))
            .sum(),
        (ObjectValue::Sphere(x), ObjectValue::Sphere(y)) => {
            let t = geodesic_angle(x.coords(), y.coords());
            t * t
        }
        _ => a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(u, v)| (u - v) * (u - v))
            .sum(),
    }
}

/// Squared distance with compatibility checks.
pub fn distance_sq(a: &ObjectValue, b: &ObjectValue, kind: MetricSpaceKind) -> Result<f64> {
    a.check_compatible(b, kind)?;
    Ok(dist_sq(a, b))
}

/// Angle between two unit vectors, `2·atan2(‖a−b‖, ‖a+b‖)`.
///
/// Equal to `arccos(clamp(aᵀb, −1, 1))` but accurate near 0 and π.
pub fn geodesic_angle(a: &[f64], b: &[f64]) -> f64 {
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        diff += (x - y) * (x - y);
        sum += (x + y) * (x + y);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}
