use std::fmt::Write as _;
use std::path::Path;

use ifreg::inference::{confidence_region, ConfidenceRegion};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;
use crate::payload::{self, rows_matrix, FitPayload, PowerPayload, StudyPayload};

/// Smallest quantile increment used when converting to densities.
const MIN_INCREMENT: f64 = 1e-8;

/// The fields of a test result that plotting needs.
#[derive(Deserialize)]
struct RegionSource {
    theta_reduced: Vec<f64>,
    lambda: Vec<Vec<f64>>,
    bins: usize,
    gamma: f64,
}

/// Density samples `(x, f(x))` of a quantile function on `probs`, from
/// reciprocal slopes between consecutive grid points.
pub fn density_from_quantiles(probs: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    probs
        .windows(2)
        .zip(values.windows(2))
        .map(|(p, q)| {
            let dq = (q[1] - q[0]).max(MIN_INCREMENT);
            (0.5 * (q[0] + q[1]), (p[1] - p[0]) / dq)
        })
        .collect()
}

/// The region projected onto two reduced coordinates (0-based).
pub fn marginal_region(
    region: &ConfidenceRegion,
    lambda_over_m: &DMatrix<f64>,
    i: usize,
    j: usize,
) -> CliResult<ConfidenceRegion> {
    let sub = DMatrix::from_fn(2, 2, |a, b| lambda_over_m[([i, j][a], [i, j][b])]);
    let shape = sub
        .try_inverse()
        .ok_or_else(|| CliError::Input("marginal covariance is singular".into()))?;
    Ok(ConfidenceRegion {
        center: vec![region.center[i], region.center[j]],
        shape,
        threshold: region.threshold,
        level: region.level,
    })
}

fn csv_line(out: &mut String, values: &[f64]) {
    let row: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "{}", row.join(","));
}

fn parse_coords(coords: &str, k: usize) -> CliResult<(usize, usize)> {
    let parsed: Vec<usize> = coords
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("--coords: '{}' is not an index", c.trim())))
        })
        .collect::<CliResult<_>>()?;
    match parsed[..] {
        [a, b] if a != b && (1..=k).contains(&a) && (1..=k).contains(&b) => Ok((a - 1, b - 1)),
        _ => Err(CliError::Input(format!(
            "--coords needs two distinct indices in 1..={k}"
        ))),
    }
}

pub fn run(input: &Path, out_dir: &Path, points: usize, coords: &str) -> CliResult<()> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let kind = payload::kind_of(&text, input)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut written = Vec::new();
    match kind.as_str() {
        "fit" => {
            let fit: FitPayload = payload::parse(&text, input, "fit")?;
            let mut table = String::from("bin,projection,value_index,value\n");
            for (b, (t, obj)) in fit.fitted.projection.iter().zip(&fit.fitted.objects).enumerate() {
                for (i, v) in obj.iter().enumerate() {
                    let _ = writeln!(table, "{b},{t},{i},{v}");
                }
            }
            write_atomic(&out_dir.join("fitted.csv"), &table)?;
            written.push("fitted.csv");
            if let Some(probs) = &fit.fitted.probs {
                let mut dens = String::from("bin,projection,x,density\n");
                for (b, (t, obj)) in fit.fitted.projection.iter().zip(&fit.fitted.objects).enumerate() {
                    for (x, f) in density_from_quantiles(probs, obj) {
                        let _ = writeln!(dens, "{b},{t},{x},{f}");
                    }
                }
                write_atomic(&out_dir.join("densities.csv"), &dens)?;
                written.push("densities.csv");
            }
        }
        "test" => {
            let src: RegionSource =
                toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
            let lambda = rows_matrix(&src.lambda)?;
            let k = src.theta_reduced.len();
            let region = confidence_region(&src.theta_reduced, &lambda, src.bins, src.gamma)?;
            if k == 1 {
                let half = (region.threshold / region.shape[(0, 0)]).sqrt();
                let mut table = String::from("lower,center,upper\n");
                csv_line(
                    &mut table,
                    &[region.center[0] - half, region.center[0], region.center[0] + half],
                );
                write_atomic(&out_dir.join("interval.csv"), &table)?;
                written.push("interval.csv");
            } else {
                let (i, j) = parse_coords(coords, k)?;
                let plane = marginal_region(&region, &(lambda / src.bins as f64), i, j)?;
                let mut table = String::from("x,y\n");
                for [x, y] in plane.ellipse(points.max(3))? {
                    csv_line(&mut table, &[x, y]);
                }
                write_atomic(&out_dir.join("ellipse.csv"), &table)?;
                written.push("ellipse.csv");
            }
        }
        "power" => {
            let power: PowerPayload = payload::parse(&text, input, "power")?;
            let mut table = String::from("delta,rate,se,lower,upper\n");
            for row in &power.rows {
                let se = (row.rate * (1.0 - row.rate) / row.completed.max(1) as f64).sqrt();
                csv_line(
                    &mut table,
                    &[
                        row.delta,
                        row.rate,
                        se,
                        (row.rate - 2.0 * se).max(0.0),
                        (row.rate + 2.0 * se).min(1.0),
                    ],
                );
            }
            write_atomic(&out_dir.join("power.csv"), &table)?;
            written.push("power.csv");
        }
        "study" => {
            let study: StudyPayload = payload::parse(&text, input, "study")?;
            let mut table = String::from("run,angle,msd,gfr_msd\n");
            for (r, ((est, m), g)) in study.estimates.iter().zip(&study.msd).zip(&study.gfr_msd).enumerate() {
                let cos: f64 = est.iter().zip(&study.theta0).map(|(a, b)| a * b).sum();
                let _ = writeln!(table, "{r},{},{m},{g}", cos.clamp(-1.0, 1.0).acos());
            }
            write_atomic(&out_dir.join("study.csv"), &table)?;
            written.push("study.csv");
        }
        other => {
            return Err(CliError::Input(format!(
                "{}: nothing to plot for a '{other}' result",
                input.display()
            )))
        }
    }
    println!("wrote {} to {}", written.join(", "), out_dir.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_quantiles_give_flat_density() {
        let probs: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let values: Vec<f64> = probs.iter().map(|p| 2.0 * p - 1.0).collect();
        for (x, f) in density_from_quantiles(&probs, &values) {
            assert!((-1.0..=1.0).contains(&x));
            assert!((f - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_quantile_segments_are_floored() {
        let d = density_from_quantiles(&[0.1, 0.2], &[1.0, 1.0]);
        assert_eq!(d, vec![(1.0, 0.1 / MIN_INCREMENT)]);
    }
}
