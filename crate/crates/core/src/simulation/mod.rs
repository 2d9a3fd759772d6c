//! Simulation designs, evaluation metrics and Monte Carlo drivers.

mod generators;
mod metrics;
mod study;

pub use generators::{
    adjacency_error_bounds, adjacency_predictor_cov, euclidean_predictor_cov, expit, gen_predictors,
    gen_response_adjacency, gen_response_euclidean, gen_response_setting1, gen_response_setting2, gen_truncated_mvn,
    transport, Link,
};
pub use metrics::{bias_dev, msd, rmpe};
pub use study::{
    default_theta0, evaluate_run, generate, null_test_once, run_mc_study, run_size_power_study, McReport, McRun,
    PowerRow, PowerTable, Scenario, SimData, SimSpec,
};
