use thiserror::Error;

pub type Result<T, E = IfrError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IfrError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("weights must sum to 1 (got {sum:.3e})")]
    InvalidWeights { sum: f64 },

    #[error("weighted Fréchet mean is degenerate: {0}")]
    DegenerateMean(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("insufficient local data at t = {t} with bandwidth {bandwidth}")]
    InsufficientLocalData { t: f64, bandwidth: f64 },

    #[error("no candidate bandwidth admits a held-out fit")]
    NoFeasibleBandwidth,

    #[error("no candidate bin count admits a leave-one-bin-out fit")]
    NoFeasibleBins,

    #[error("reduced direction has norm {norm} >= 1")]
    OutOfBall { norm: f64 },

    #[error("all projections are identical; bins cannot be formed")]
    DegenerateProjection,

    #[error("index fit failed: {0}")]
    FitFailure(String),

    #[error("predictor covariance is singular (condition number {condition:.3e})")]
    SingularDesign { condition: f64 },

    #[error("finite-difference step leaves the unit ball along coordinate {coordinate}")]
    StepError { coordinate: usize },

    #[error("Hessian estimate is singular (condition number {condition:.3e})")]
    SingularHessian { condition: f64 },

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("bootstrap failed: {failed} of {total} replicates did not produce an estimate")]
    BootstrapFailure { failed: usize, total: usize },

    #[error("hypothesis matrix has {rows} rows but rank {rank}")]
    RankDeficient { rows: usize, rank: usize },

    #[error("confidence region shape is not positive definite")]
    DegenerateRegion,

    #[error("invalid covariance specification: {0}")]
    Covariance(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}
