use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown coefficient family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameters for `{family}`: {reason}")]
    InvalidParams { family: String, reason: String },

    #[error("coefficient table line {line}: {reason}")]
    TableParse { line: usize, reason: String },

    #[error("off-diagonal coefficient b_{k} = {b} is not positive")]
    NonPositiveOffDiagonal { k: usize, b: f64 },

    #[error("coefficient at index {k} is not finite")]
    NonFiniteCoefficient { k: usize },

    #[error("index {k} is beyond the coefficient table (length {len})")]
    IndexBeyondTable { k: usize, len: usize },

    #[error("non-finite value in recurrence at step {k}")]
    NonFiniteIntermediate { k: usize },

    #[error("Im lambda must be nonzero")]
    RealSpectralParameter,

    #[error("approximant pole: P_{n}(lambda) = 0")]
    ApproximantPole { n: usize },

    #[error("zero denominator at level n = {n}")]
    ZeroDenominator { n: usize },

    #[error("real point {x} lies inside the closed band [{lo}, {hi}]; use the boundary limit")]
    InsideBand { x: f64, lo: f64, hi: f64 },

    #[error(
        "numerical breakdown: weight denominator {g} <= 0 inside the band at n = {n}, x = {x}"
    )]
    NumericalBreakdown { n: usize, x: f64, g: f64 },

    #[error("diagonal coefficient a_{k} is zero")]
    ZeroDiagonal { k: usize },

    #[error("diagonal coefficient a_{k} = {a} is nonzero")]
    NonZeroDiagonal { k: usize, a: f64 },

    #[error("quadrature failed on [{lo}, {hi}]: {reason}")]
    QuadratureFailure { lo: f64, hi: f64, reason: String },

    #[error("eigen-solver did not converge for eigenvalue {index}")]
    EigenSolverFailure { index: usize },

    #[error("singular tridiagonal system at row {row}")]
    SingularSystem { row: usize },

    #[error("range mismatch: {0}")]
    RangeMismatch(String),

    #[error("difference step underflows at x = {x}")]
    StepUnderflow { x: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
