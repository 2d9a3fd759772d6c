mod common;

use ifreg::index_fit::{DirectionParam, FitConfig};
use ifreg::metric_spaces::{MetricSpaceKind, ObjectValue, ProbGrid};
use ifreg::simulation::{
    bias_dev, gen_predictors, gen_response_adjacency, gen_response_euclidean, gen_response_setting1,
    gen_response_setting2, generate, msd, rmpe, run_mc_study, transport, Link, Scenario, SimSpec,
};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn copula_predictors() {
    let n = 100_000;
    let x = gen_predictors(n, 3, 0.25, &mut common::rng(1)).unwrap();
    assert!(x.iter().all(|v| *v > -1.0 && *v < 1.0));
    let c = corr(x.column(0).as_slice(), x.column(1).as_slice());
    // Pearson correlation of the uniform margins is (6/π)·asin(ρ/2).
    let oracle = 6.0 / std::f64::consts::PI * (0.125f64).asin();
    assert!((c - oracle).abs() < 0.01, "{c} vs {oracle}");

    let x = gen_predictors(n, 2, 0.0, &mut common::rng(2)).unwrap();
    let c = corr(x.column(0).as_slice(), x.column(1).as_slice());
    assert!(c.abs() < 3.0 / (n as f64).sqrt(), "{c}");
    assert!(gen_predictors(10, 3, -0.6, &mut common::rng(3)).is_err());
}

#[test]
fn setting_one_responses() {
    let grid = ProbGrid::standard();
    let mid = grid.probs().iter().position(|p| (p - 0.5).abs() < 1e-12).unwrap();
    let mut r = common::rng(4);
    let draws: Vec<f64> = (0..100_000)
        .map(|_| {
            let q = gen_response_setting1(1.0, Link::Identity, &grid, &mut r);
            assert!(q.values().windows(2).all(|w| w[0] <= w[1]));
            q.values()[mid]
        })
        .collect();
    let (m, se) = mean_sd(&draws);
    assert!((m - 1.0).abs() < 3.0 * se, "{m} ± {se}");

    let truth = SimSpec::new(Scenario::DistSettingI, 100, 4).truth(0.0);
    let phi = Normal::standard();
    for (v, p) in truth.as_slice().iter().zip(grid.probs()) {
        assert!((v - 0.5 * phi.inverse_cdf(*p)).abs() < 1e-12);
    }
}

#[test]
fn setting_two_responses() {
    let grid = ProbGrid::standard();
    let mid = grid.probs().iter().position(|p| (p - 0.5).abs() < 1e-12).unwrap();
    let mut r = common::rng(5);
    let draws: Vec<f64> = (0..100_000)
        .map(|_| {
            let q = gen_response_setting2(0.0, Link::Identity, &grid, &mut r);
            assert!(q.values().windows(2).all(|w| w[0] <= w[1]));
            q.values()[mid]
        })
        .collect();
    let (m, se) = mean_sd(&draws);
    assert!(m.abs() < 3.0 * se, "{m} ± {se}");
    for k in 1..=3 {
        for a in [-2.0, -0.3, 0.0, 0.7, 1.9] {
            assert!((0.5 * (transport(k, a) + transport(-k, a)) - a).abs() < 1e-14);
            assert!(transport(k, a + 1e-6) >= transport(k, a));
        }
    }
}

#[test]
fn adjacency_responses() {
    let mut r = common::rng(6);
    let t: f64 = 0.4;
    let zeta = 1.0 / (1.0 + (-t).exp());
    let draws: Vec<_> = (0..100_000).map(|_| gen_response_adjacency(t, 3, &mut r)).collect();
    assert!(draws
        .iter()
        .all(|m| m.entries().iter().all(|v| (0.0..=1.0).contains(v))));
    let off: Vec<f64> = draws.iter().map(|m| m.get(0, 1)).collect();
    let diag: Vec<f64> = draws.iter().map(|m| m.get(2, 2)).collect();
    let half_width = 0.5 * (1.0 - zeta);
    let (mo, so) = mean_sd(&off);
    let (md, sd) = mean_sd(&diag);
    assert!((mo - half_width).abs() < 3.0 * so, "{mo}");
    assert!((md - (zeta + half_width)).abs() < 3.0 * sd, "{md}");

    let saturated = gen_response_adjacency(20.0, 4, &mut r);
    let z = 1.0 / (1.0 + (-20.0f64).exp());
    for i in 0..4 {
        assert!((saturated.get(i, i) - z).abs() < 1e-8);
    }
}

#[test]
fn euclidean_responses() {
    let mut r = common::rng(7);
    for t in [-1.0, 0.0, 0.8] {
        let y = gen_response_euclidean(t, Link::Square, 0.0, &mut r);
        assert_eq!(y.coords(), &[t * t]);
        assert_eq!(
            gen_response_euclidean(-t, Link::Square, 0.0, &mut r).coords(),
            y.coords()
        );
    }
    let n = 10_000;
    let ts: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let ys: Vec<f64> = ts
        .iter()
        .map(|&t| gen_response_euclidean(t, Link::Identity, 0.3, &mut r).coords()[0])
        .collect();
    let (mt, _) = mean_sd(&ts);
    let (my, _) = mean_sd(&ys);
    let sxx: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
    let slope: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - mt) * (y - my)).sum::<f64>() / sxx;
    let resid: f64 = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (y - my - slope * (t - mt)).powi(2))
        .sum::<f64>();
    let se = (resid / (n - 2) as f64 / sxx).sqrt();
    assert!((slope - 1.0).abs() < 3.0 * se, "{slope} ± {se}");
}

#[test]
fn bias_dev_examples() {
    let theta0 = DirectionParam::from_vector(&[1.0, 0.2, -0.1]).unwrap();
    let (b0, d0) = bias_dev(&vec![theta0.clone(); 5], &theta0).unwrap();
    assert!(b0 < 1e-7 && d0 < 1e-14, "{b0} {d0}");
    let alpha: f64 = 0.2;
    let plus = DirectionParam::from_full(vec![alpha.cos(), alpha.sin(), 0.0]).unwrap();
    let minus = DirectionParam::from_full(vec![alpha.cos(), -alpha.sin(), 0.0]).unwrap();
    let e1 = DirectionParam::lift(&[0.0, 0.0]).unwrap();
    let (bias, dev) = bias_dev(&[plus, minus], &e1).unwrap();
    assert!(bias < 1e-9 && dev < 1e-12, "{bias} {dev}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bias_dev_ignores_order(raw in prop::collection::vec(prop::collection::vec(-0.4..0.4f64, 2), 2..8), shift in 1usize..7) {
        let est: Vec<DirectionParam> = raw.iter().map(|v| DirectionParam::lift(v).unwrap()).collect();
        let mut rotated = est.clone();
        rotated.rotate_left(shift % est.len());
        let theta0 = DirectionParam::lift(&[0.1, 0.0]).unwrap();
        let (b1, d1) = bias_dev(&est, &theta0).unwrap();
        let (b2, d2) = bias_dev(&rotated, &theta0).unwrap();
        prop_assert!((b1 - b2).abs() < 1e-9 && (d1 - d2).abs() < 1e-9);
    }
}

#[test]
fn distance_summaries() {
    let zeros = vec![ObjectValue::scalar(0.0); 2];
    let ones = vec![ObjectValue::scalar(1.0); 2];
    assert_eq!(msd(&ones, &ones, MetricSpaceKind::Euclidean).unwrap(), 0.0);
    assert_eq!(msd(&ones, &zeros, MetricSpaceKind::Euclidean).unwrap(), 1.0);
    let a = vec![ObjectValue::scalar(0.3), ObjectValue::scalar(-2.0)];
    let b = vec![ObjectValue::scalar(1.0), ObjectValue::scalar(0.5)];
    let m = msd(&a, &b, MetricSpaceKind::Euclidean).unwrap();
    assert_eq!(rmpe(&a, &b, MetricSpaceKind::Euclidean).unwrap(), m.sqrt());
    assert!(msd(&a, &b[..1], MetricSpaceKind::Euclidean).is_err());
}

#[test]
fn studies_are_deterministic_and_schedule_free() {
    let spec = SimSpec::new(Scenario::DistSettingI, 60, 3);
    assert_eq!(generate(&spec, 5).unwrap().sample, generate(&spec, 5).unwrap().sample);
    let generated = generate(&SimSpec::new(Scenario::Adjacency, 40, 4), 1).unwrap();
    for y in generated.sample.responses() {
        assert!(y.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
    }
    let config = FitConfig {
        n_directions: 30,
        ..FitConfig::default()
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_mc_study(&spec, 4, &config, 77).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    let single = run_mc_study(&spec, 1, &config, 3).unwrap();
    assert_eq!(single.estimates.len(), 1);
    assert!(single.bias.is_finite() && single.msd[0].is_finite());
}
