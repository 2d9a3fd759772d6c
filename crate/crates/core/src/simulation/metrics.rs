use crate::error::{IfrError, Result};
use crate::index_fit::DirectionParam;
use crate::metric_spaces::{
    distance_sq, geodesic_angle, weighted_frechet_mean, MetricSpaceKind, ObjectValue, SpherePoint,
};

/// Angle from the intrinsic sphere mean of the estimates to `theta0` (bias)
/// and the sample variance of the estimates' angles to that mean (dev).
pub fn bias_dev(estimates: &[DirectionParam], theta0: &DirectionParam) -> Result<(f64, f64)> {
    if estimates.is_empty() {
        return Err(IfrError::InvalidInput("bias_dev needs at least one estimate".into()));
    }
    if estimates.iter().any(|e| e.p() != theta0.p()) {
        return Err(IfrError::Dimension("estimates and truth differ in dimension".into()));
    }
    let points: Vec<ObjectValue> = estimates
        .iter()
        .map(|e| SpherePoint::new(e.full().to_vec()).map(ObjectValue::from))
        .collect::<Result<_>>()?;
    let w = vec![1.0 / points.len() as f64; points.len()];
    let mean = weighted_frechet_mean(&points, &w, MetricSpaceKind::SphereGeodesic)?;
    let bias = geodesic_angle(mean.as_slice(), theta0.full());
    let angles: Vec<f64> = estimates
        .iter()
        .map(|e| geodesic_angle(e.full(), mean.as_slice()))
        .collect();
    let r = angles.len();
    let dev = if r < 2 {
        0.0
    } else {
        let m = angles.iter().sum::<f64>() / r as f64;
        angles.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (r - 1) as f64
    };
    Ok((bias, dev))
}

/// Mean squared distance between paired objects.
pub fn msd(fits: &[ObjectValue], truths: &[ObjectValue], kind: MetricSpaceKind) -> Result<f64> {
    if fits.len() != truths.len() {
        return Err(IfrError::LengthMismatch {
            left: fits.len(),
            right: truths.len(),
        });
    }
    if fits.is_empty() {
        return Err(IfrError::InvalidInput("msd of empty lists".into()));
    }
    let total = fits
        .iter()
        .zip(truths)
        .map(|(a, b)| distance_sq(a, b, kind))
        .sum::<Result<f64>>()?;
    Ok(total / fits.len() as f64)
}

/// Root mean squared prediction error, `√msd`.
pub fn rmpe(predictions: &[ObjectValue], observed: &[ObjectValue], kind: MetricSpaceKind) -> Result<f64> {
    msd(predictions, observed, kind).map(f64::sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_offsets() {
        let truth = vec![ObjectValue::scalar(0.0); 2];
        let fits = vec![ObjectValue::scalar(1.0); 2];
        assert_eq!(msd(&fits, &truth, MetricSpaceKind::Euclidean).unwrap(), 1.0);
        assert_eq!(rmpe(&truth, &truth, MetricSpaceKind::Euclidean).unwrap(), 0.0);
        assert!(msd(&fits[..1], &truth, MetricSpaceKind::Euclidean).is_err());
    }

    #[test]
    fn symmetric_pair_has_no_bias() {
        let a = 0.2f64;
        let theta0 = DirectionParam::from_full(vec![1.0, 0.0, 0.0]).unwrap();
        let e1 = DirectionParam::from_full(vec![a.cos(), a.sin(), 0.0]).unwrap();
        let e2 = DirectionParam::from_full(vec![a.cos(), -a.sin(), 0.0]).unwrap();
        let (bias, dev) = bias_dev(&[e1, e2], &theta0).unwrap();
        assert!(bias < 1e-9 && dev < 1e-15);
        let (bias, dev) = bias_dev(&[theta0.clone(), theta0.clone()], &theta0).unwrap();
        assert_eq!((bias, dev), (0.0, 0.0));
    }
}
