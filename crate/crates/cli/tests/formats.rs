use std::path::Path;

use ifreg::{
    EuclideanVec, MatrixConstraint, MetricSpaceKind, ObjectValue, ProbGrid, QuantileFunction, SpherePoint, SymMatrix,
};
use ifreg_cli::dataset::{format_predictors, format_responses, parse_responses, read_predictors, ResponseFormat};
use ifreg_cli::payload::{self, HypothesisPayload, RegionPayload, TestPayload};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn rewrite(objects: &[ObjectValue], format: ResponseFormat) -> (String, String) {
    let first = format_responses(objects).unwrap();
    let parsed = parse_responses(&first, Path::new("responses.csv"), format).unwrap();
    (first, format_responses(&parsed).unwrap())
}

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1.0..1.0f64, Just(0.0), Just(1e-300)]
}

fn quantiles() -> impl Strategy<Value = Vec<ObjectValue>> {
    (2usize..8, 1usize..5).prop_flat_map(|(k, n)| {
        prop::collection::vec(prop::collection::vec(0.0..3.0f64, k), n).prop_map(move |rows| {
            let grid = ProbGrid::equispaced(k, 0.01, 0.99).unwrap();
            rows.into_iter()
                .map(|steps| {
                    let values: Vec<f64> = steps
                        .iter()
                        .scan(-2.0, |acc, s| {
                            *acc += s;
                            Some(*acc)
                        })
                        .collect();
                    QuantileFunction::new(grid.clone(), values).unwrap().into()
                })
                .collect()
        })
    })
}

fn matrices() -> impl Strategy<Value = Vec<ObjectValue>> {
    (1usize..4, 1usize..4).prop_flat_map(|(dim, n)| {
        prop::collection::vec(prop::collection::vec(-1.0..1.0f64, dim * dim), n).prop_map(move |rows| {
            rows.into_iter()
                .map(|a| {
                    let a = DMatrix::from_row_slice(dim, dim, &a);
                    let g = &a * a.transpose();
                    let g = (&g + g.transpose()) * 0.5;
                    SymMatrix::new(dim, g.as_slice().to_vec(), MatrixConstraint::Psd)
                        .unwrap()
                        .into()
                })
                .collect()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn predictors_rewrite_identically(rows in 1usize..6, cols in 1usize..5, seed in prop::collection::vec(value(), 30)) {
        let x = DMatrix::from_fn(rows, cols, |i, j| seed[(i * cols + j) % seed.len()]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let first = format_predictors(&x);
        std::fs::write(&path, &first).unwrap();
        let back = read_predictors(&path).unwrap();
        prop_assert_eq!(format_predictors(&back), first);
    }

    #[test]
    fn distributions_rewrite_identically(objects in quantiles()) {
        let (a, b) = rewrite(&objects, ResponseFormat::new(MetricSpaceKind::Wasserstein2));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn matrices_rewrite_identically(objects in matrices()) {
        let (a, b) = rewrite(&objects, ResponseFormat::new(MetricSpaceKind::Frobenius));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sphere_points_rewrite_identically(raw in prop::collection::vec(prop::collection::vec(0.01..1.0f64, 3), 1..5)) {
        let objects: Vec<ObjectValue> = raw
            .iter()
            .map(|v| {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                SpherePoint::new(v.iter().map(|x| x / norm).collect()).unwrap().into()
            })
            .collect();
        let (a, b) = rewrite(&objects, ResponseFormat::new(MetricSpaceKind::SphereGeodesic));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn vectors_rewrite_identically(raw in prop::collection::vec(prop::collection::vec(value(), 2), 1..6)) {
        let objects: Vec<ObjectValue> = raw.into_iter().map(|v| EuclideanVec::new(v).unwrap().into()).collect();
        let (a, b) = rewrite(&objects, ResponseFormat::new(MetricSpaceKind::Euclidean));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn result_payloads_rewrite_identically(v in prop::collection::vec(value(), 8), reject in any::<bool>()) {
        let result = TestPayload {
            schema_version: payload::SCHEMA_VERSION,
            kind: "test".into(),
            covariance: "bootstrap".into(),
            bootstrap_b: 200,
            failed_replicates: 1,
            bins: 7,
            theta_reduced: vec![v[0], v[1]],
            lambda: vec![vec![v[2], v[3]], vec![v[3], v[4]]],
            statistic: v[5].abs(),
            df: 2,
            p_value: 0.5,
            alpha: 0.05,
            reject,
            gamma: 0.05,
            hypothesis: HypothesisPayload { matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]], zeta: vec![v[6], v[7]] },
            region: Some(RegionPayload { center: vec![v[0], v[1]], shape: vec![vec![1.0, 0.0], vec![0.0, 1.0]], threshold: 5.99, level: 0.95 }),
        };
        let text = payload::to_text(&result).unwrap();
        let back: TestPayload = payload::parse(&text, Path::new("test.toml"), "test").unwrap();
        prop_assert_eq!(&back, &result);
        prop_assert_eq!(payload::to_text(&back).unwrap(), text);
    }
}
