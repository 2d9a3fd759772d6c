use std::path::PathBuf;

use clap::Args;
use ifreg::simulation::{generate, run_mc_study, run_size_power_study, Link, Scenario, SimSpec};
use ifreg::MetricSpaceKind;

use crate::config::{constraint_name, RunConfig};
use crate::dataset::{write_predictors, write_responses};
use crate::error::{CliError, CliResult};
use crate::output::{sig6, write_atomic};
use crate::payload::{self, PowerPayload, PowerRowPayload, StudyPayload, TruthPayload};

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    /// setting1, setting2, adjacency or euclidean.
    #[arg(long)]
    pub scenario: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub p: usize,
    /// identity, square, exponential or expit (defaults by scenario).
    #[arg(long)]
    pub link: Option<String>,
    /// Predictor equicorrelation for the distribution settings.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Network size for adjacency responses.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Noise standard deviation for Euclidean responses.
    #[arg(long)]
    pub noise_sd: Option<f64>,
}

impl DesignArgs {
    pub fn spec(&self) -> CliResult<SimSpec> {
        let scenario: Scenario = self.scenario.parse()?;
        let mut spec = SimSpec::new(scenario, self.n, self.p);
        if let Some(l) = &self.link {
            spec.link = l.parse::<Link>()?;
        }
        if let Some(r) = self.rho {
            spec.rho = r;
        }
        if let Some(m) = self.nodes {
            spec.nodes = m;
        }
        if let Some(s) = self.noise_sd {
            spec.noise_sd = s;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    /// Write one dataset (predictors.csv, responses.csv, dataset.cfg, truth.toml) here.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Run a Monte Carlo study with this many replications.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Where to write the study result.
    #[arg(long, value_name = "PATH", requires = "runs")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PowerArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    /// Comma-separated departures δ; the truth is lift(δ, …, δ).
    #[arg(long, default_value = "0,0.2,0.5")]
    pub deltas: String,
    #[arg(long, default_value_t = 200)]
    pub runs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn metric_config(kind: MetricSpaceKind, scenario: Scenario) -> String {
    let mut text = format!("metric = {}\n", kind.name());
    if scenario == Scenario::Adjacency {
        text.push_str(&format!(
            "matrix_constraint = {}\n",
            constraint_name(ifreg::MatrixConstraint::UnitInterval)
        ));
    }
    text
}

pub fn simulate(config: &RunConfig, args: &SimulateArgs) -> CliResult<()> {
    if args.out_dir.is_none() && args.runs.is_none() {
        return Err(CliError::Input("simulate needs --out-dir, --runs, or both".into()));
    }
    let spec = args.design.spec()?;
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let data = generate(&spec, config.seed)?;
        write_predictors(&dir.join("predictors.csv"), data.sample.predictors())?;
        write_responses(&dir.join("responses.csv"), data.sample.responses())?;
        write_atomic(
            &dir.join("dataset.cfg"),
            &metric_config(spec.scenario.kind(), spec.scenario),
        )?;
        let truth = TruthPayload {
            schema_version: payload::SCHEMA_VERSION,
            kind: "simulation".into(),
            scenario: spec.scenario.to_string(),
            link: spec.link.to_string(),
            n: spec.n,
            p: spec.p,
            seed: config.seed,
            theta0: spec.theta0.full().to_vec(),
            rho: spec.rho,
            nodes: spec.nodes,
            noise_sd: spec.noise_sd,
        };
        payload::write(&dir.join("truth.toml"), &truth)?;
        println!(
            "wrote a {} dataset with n = {}, p = {} to {}",
            spec.scenario,
            spec.n,
            spec.p,
            dir.display()
        );
    }
    if let Some(runs) = args.runs {
        let report = run_mc_study(&spec, runs, &config.fit_config(), config.seed)?;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let result = StudyPayload {
            schema_version: payload::SCHEMA_VERSION,
            kind: "study".into(),
            scenario: spec.scenario.to_string(),
            link: spec.link.to_string(),
            n: spec.n,
            p: spec.p,
            runs,
            seed: config.seed,
            theta0: spec.theta0.full().to_vec(),
            bias: report.bias,
            dev: report.dev,
            mean_msd: mean(&report.msd),
            mean_gfr_msd: mean(&report.gfr_msd),
            failed: report.failed,
            msd: report.msd.clone(),
            gfr_msd: report.gfr_msd.clone(),
            estimates: report.estimates.iter().map(|e| e.full().to_vec()).collect(),
        };
        println!("runs       = {runs} ({} failed)", result.failed);
        println!("bias       = {}", sig6(result.bias));
        println!("dev        = {}", sig6(result.dev));
        println!(
            "MSD        = {} (GFR {})",
            sig6(result.mean_msd),
            sig6(result.mean_gfr_msd)
        );
        if let Some(path) = &args.report {
            payload::write(path, &result)?;
        }
    }
    Ok(())
}

pub fn power(config: &RunConfig, args: &PowerArgs) -> CliResult<()> {
    let spec = args.design.spec()?;
    let deltas = args
        .deltas
        .split(',')
        .map(|d| {
            d.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("--deltas: '{}' is not a number", d.trim())))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    let table = run_size_power_study(
        &spec,
        &deltas,
        args.runs,
        args.alpha,
        config.bootstrap_b,
        &config.fit_config(),
        config.seed,
    )?;
    println!("   delta      rate  rejections  completed  failed");
    for row in &table.rows {
        println!(
            "{:>8}  {:>8}  {:>10}  {:>9}  {:>6}",
            sig6(row.delta),
            sig6(row.rate()),
            row.rejections,
            row.completed,
            row.failed
        );
    }
    if let Some(path) = &args.out {
        let result = PowerPayload {
            schema_version: payload::SCHEMA_VERSION,
            kind: "power".into(),
            scenario: spec.scenario.to_string(),
            n: spec.n,
            p: spec.p,
            runs: args.runs,
            alpha: args.alpha,
            bootstrap_b: config.bootstrap_b,
            seed: config.seed,
            rows: table
                .rows
                .iter()
                .map(|r| PowerRowPayload {
                    delta: r.delta,
                    rejections: r.rejections,
                    completed: r.completed,
                    failed: r.failed,
                    rate: r.rate(),
                })
                .collect(),
        };
        payload::write(path, &result)?;
    }
    Ok(())
}
