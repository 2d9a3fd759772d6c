mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use ifreg::metric_spaces::{
    distance, fiedler_value, isotonic_projection, project_to_space, weighted_frechet_mean, EuclideanVec,
    MatrixConstraint, MetricSpaceKind, ObjectShape, ObjectValue, ProbGrid, QuantileFunction, SpherePoint, SymMatrix,
};
use proptest::prelude::*;

fn grid() -> Arc<ProbGrid> {
    ProbGrid::equispaced(11, 0.05, 0.95).unwrap()
}

fn quantile_strategy() -> impl Strategy<Value = ObjectValue> {
    (-2.0..2.0f64, prop::collection::vec(0.0..1.0f64, 11)).prop_map(|(start, steps)| {
        let mut v = start;
        let values = steps
            .iter()
            .map(|s| {
                v += s;
                v
            })
            .collect();
        QuantileFunction::new(grid(), values).unwrap().into()
    })
}

fn psd_strategy() -> impl Strategy<Value = ObjectValue> {
    prop::collection::vec(-1.0..1.0f64, 9).prop_map(|a| {
        let m = nalgebra::DMatrix::from_row_slice(3, 3, &a);
        let g = &m * m.transpose();
        SymMatrix::new(3, g.transpose().as_slice().to_vec(), MatrixConstraint::Psd)
            .unwrap()
            .into()
    })
}

fn sphere_strategy() -> impl Strategy<Value = ObjectValue> {
    prop::collection::vec(-1.0..1.0f64, 3)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            SpherePoint::new(v.iter().map(|x| x / n).collect()).unwrap().into()
        })
}

fn euclid_strategy() -> impl Strategy<Value = ObjectValue> {
    prop::collection::vec(-10.0..10.0f64, 3).prop_map(|v| EuclideanVec::new(v).unwrap().into())
}

fn check_axioms(a: &ObjectValue, b: &ObjectValue, c: &ObjectValue, kind: MetricSpaceKind) -> Result<(), TestCaseError> {
    let ab = distance(a, b, kind).unwrap();
    let ba = distance(b, a, kind).unwrap();
    let bc = distance(b, c, kind).unwrap();
    let ac = distance(a, c, kind).unwrap();
    prop_assert_eq!(ab, ba);
    prop_assert!(ab >= 0.0);
    prop_assert_eq!(distance(a, a, kind).unwrap(), 0.0);
    prop_assert!(ac <= ab + bc + 1e-9, "{} > {} + {}", ac, ab, bc);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn wasserstein_metric_axioms(a in quantile_strategy(), b in quantile_strategy(), c in quantile_strategy()) {
        check_axioms(&a, &b, &c, MetricSpaceKind::Wasserstein2)?;
    }

    #[test]
    fn frobenius_metric_axioms(a in psd_strategy(), b in psd_strategy(), c in psd_strategy()) {
        check_axioms(&a, &b, &c, MetricSpaceKind::Frobenius)?;
    }

    #[test]
    fn sphere_metric_axioms(a in sphere_strategy(), b in sphere_strategy(), c in sphere_strategy()) {
        check_axioms(&a, &b, &c, MetricSpaceKind::SphereGeodesic)?;
        prop_assert!(distance(&a, &b, MetricSpaceKind::SphereGeodesic).unwrap() <= PI);
    }

    #[test]
    fn euclidean_metric_axioms(a in euclid_strategy(), b in euclid_strategy(), c in euclid_strategy()) {
        check_axioms(&a, &b, &c, MetricSpaceKind::Euclidean)?;
    }
}

fn weights_summing_to_one(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..2.0f64, k - 1).prop_map(|mut w| {
        let rest: f64 = w.iter().sum();
        w.push(1.0 - rest);
        w
    })
}

proptest! {
    #[test]
    fn euclidean_mean_is_weighted_average(
        objs in prop::collection::vec(euclid_strategy(), 4),
        w in weights_summing_to_one(4),
    ) {
        let mean = weighted_frechet_mean(&objs, &w, MetricSpaceKind::Euclidean).unwrap();
        for j in 0..3 {
            let expect: f64 = objs.iter().zip(&w).map(|(o, wi)| wi * o.as_slice()[j]).sum();
            prop_assert!((mean.as_slice()[j] - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn wasserstein_mean_nonnegative_weights_is_pointwise(
        objs in prop::collection::vec(quantile_strategy(), 3),
        raw in prop::collection::vec(0.01..1.0f64, 3),
    ) {
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let mean = weighted_frechet_mean(&objs, &w, MetricSpaceKind::Wasserstein2).unwrap();
        for k in 0..11 {
            let expect: f64 = objs.iter().zip(&w).map(|(o, wi)| wi * o.as_slice()[k]).sum();
            prop_assert!((mean.as_slice()[k] - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn wasserstein_mean_signed_weights_is_projected_average(
        objs in prop::collection::vec(quantile_strategy(), 3),
        w in weights_summing_to_one(3),
    ) {
        let mean = weighted_frechet_mean(&objs, &w, MetricSpaceKind::Wasserstein2).unwrap();
        let avg: Vec<f64> = (0..11)
            .map(|k| objs.iter().zip(&w).map(|(o, wi)| wi * o.as_slice()[k]).sum())
            .collect();
        let proj = isotonic_projection(&avg, grid().quadrature_weights());
        for (a, b) in mean.as_slice().iter().zip(&proj) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        QuantileFunction::new(grid(), mean.as_slice().to_vec()).unwrap();
    }

    #[test]
    fn matrix_means_satisfy_constraints(
        objs in prop::collection::vec(psd_strategy(), 3),
        w in weights_summing_to_one(3),
    ) {
        let mean = weighted_frechet_mean(&objs, &w, MetricSpaceKind::Frobenius).unwrap();
        let m = mean.as_matrix().unwrap();
        SymMatrix::new(3, m.entries().to_vec(), MatrixConstraint::Psd).unwrap();
    }

    #[test]
    fn sphere_means_are_unit(
        objs in prop::collection::vec(sphere_strategy(), 3),
        raw in prop::collection::vec(0.05..1.0f64, 3),
    ) {
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
        if let Ok(mean) = weighted_frechet_mean(&objs, &w, MetricSpaceKind::SphereGeodesic) {
            let norm = mean.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn quantile_projection_idempotent(raw in prop::collection::vec(-3.0..3.0f64, 11)) {
        let shape = ObjectShape::Quantile(grid());
        let once = project_to_space(&raw, &shape).unwrap();
        let twice = project_to_space(once.as_slice(), &shape).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn psd_projection_idempotent(raw in prop::collection::vec(-2.0..2.0f64, 9)) {
        let shape = ObjectShape::Matrix { dim: 3, constraint: MatrixConstraint::Psd };
        let once = project_to_space(&raw, &shape).unwrap();
        let twice = project_to_space(once.as_slice(), &shape).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn correlation_projection_idempotent(raw in prop::collection::vec(-1.0..1.0f64, 9)) {
        let shape = ObjectShape::Matrix { dim: 3, constraint: MatrixConstraint::Correlation };
        let once = project_to_space(&raw, &shape).unwrap();
        let twice = project_to_space(once.as_slice(), &shape).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn unit_interval_projection_idempotent(raw in prop::collection::vec(-0.5..1.5f64, 9)) {
        let shape = ObjectShape::Matrix { dim: 3, constraint: MatrixConstraint::UnitInterval };
        let once = project_to_space(&raw, &shape).unwrap();
        let twice = project_to_space(once.as_slice(), &shape).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn sphere_projection_idempotent(raw in prop::collection::vec(-1.0..1.0f64, 4)) {
        prop_assume!(raw.iter().any(|v| v.abs() > 1e-3));
        let shape = ObjectShape::Sphere(4);
        let once = project_to_space(&raw, &shape).unwrap();
        let twice = project_to_space(once.as_slice(), &shape).unwrap();
        prop_assert_eq!(once, twice);
    }
}

#[test]
fn wasserstein_half_half_mean_matches_lattice_oracle() {
    let g = ProbGrid::equispaced(21, 0.0, 1.0).unwrap();
    let q1: Vec<f64> = g.probs().to_vec();
    let q2: Vec<f64> = g.probs().iter().map(|s| 2.0 * s).collect();
    let objs: Vec<ObjectValue> = [&q1, &q2]
        .iter()
        .map(|v| QuantileFunction::new(g.clone(), v.to_vec()).unwrap().into())
        .collect();
    let mean = weighted_frechet_mean(&objs, &[0.5, 0.5], MetricSpaceKind::Wasserstein2).unwrap();
    let oracle = common::monotone_lattice_minimizer(&[q1, q2], &[0.5, 0.5], g.quadrature_weights(), 0.0, 2.0, 4001);
    for ((m, o), s) in mean.as_slice().iter().zip(&oracle).zip(g.probs()) {
        assert!((m - 1.5 * s).abs() < 1e-12);
        assert!((m - o).abs() <= 2.5e-4);
    }
}

#[test]
fn sphere_midpoint_matches_great_circle_search() {
    let objs: Vec<ObjectValue> = vec![
        SpherePoint::new(vec![1.0, 0.0, 0.0]).unwrap().into(),
        SpherePoint::new(vec![0.0, 1.0, 0.0]).unwrap().into(),
    ];
    let mean = weighted_frechet_mean(&objs, &[0.5, 0.5], MetricSpaceKind::SphereGeodesic).unwrap();
    // Oracle: scan the great circle through e₁ and e₂.
    let best = (0..=100_000)
        .map(|i| i as f64 / 100_000.0 * 2.0 * PI)
        .min_by(|a, b| {
            let f = |phi: f64| {
                let d1 = phi.cos().clamp(-1.0, 1.0).acos();
                let d2 = phi.sin().clamp(-1.0, 1.0).acos();
                d1 * d1 + d2 * d2
            };
            f(*a).partial_cmp(&f(*b)).unwrap()
        })
        .unwrap();
    let oracle = [best.cos(), best.sin(), 0.0];
    for (m, o) in mean.as_slice().iter().zip(oracle) {
        assert!((m - o).abs() < 1e-4);
    }
    for (m, o) in mean.as_slice().iter().zip([FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]) {
        assert!((m - o).abs() < 1e-8);
    }
}

#[test]
fn point_mass_weights_return_first_object() {
    let mut r = common::rng(3);
    let objs: Vec<ObjectValue> = (0..3)
        .map(|_| {
            QuantileFunction::new(grid(), common::random_monotone(11, &mut r))
                .unwrap()
                .into()
        })
        .collect();
    let mean = weighted_frechet_mean(&objs, &[1.0, 0.0, 0.0], MetricSpaceKind::Wasserstein2).unwrap();
    assert_eq!(mean, objs[0]);
}

#[test]
fn fiedler_examples() {
    let id = SymMatrix::new(
        3,
        vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        MatrixConstraint::Correlation,
    )
    .unwrap();
    assert!(fiedler_value(&id).abs() < 1e-12);
    let ones = SymMatrix::new(3, vec![1.0; 9], MatrixConstraint::Correlation).unwrap();
    assert!((fiedler_value(&ones) - 3.0).abs() < 1e-10);
    for w in [0.1, 0.5, 1.0] {
        let m = SymMatrix::new(2, vec![1.0, w, w, 1.0], MatrixConstraint::Correlation).unwrap();
        assert!((fiedler_value(&m) - 2.0 * w).abs() < 1e-12);
    }
}
