use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("empty family")]
    EmptyFamily,

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("incomplete family: rank {rank} < dimension {dim}")]
    IncompleteFamily { rank: usize, dim: usize },

    #[error("not a Parseval frame: defect {defect:e} exceeds {tolerance:e}")]
    NotParseval { defect: f64, tolerance: f64 },

    #[error("not an orthogonal projector: residual {residual:e}")]
    NotProjector { residual: f64 },

    #[error("matrix is not invertible")]
    NotInvertible,

    #[error("mixed branch unsupported: spectrum of X*X spans [{min:e}, {max:e}] around 1")]
    MixedBranch { min: f64, max: f64 },

    #[error("matrix is not positive: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("not a Riesz subfamily: {0}")]
    NotRieszSubfamily(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("degenerate weights unsupported in secular solver: {0}")]
    DegenerateWeights(String),

    #[error("invalid block: {0}")]
    InvalidBlock(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("insufficient half-width for Hermite order {n}: need L >= {required:.3}, have {half_width:.3}")]
    InsufficientDomain { n: usize, required: f64, half_width: f64 },

    #[error("shift {0} is not a grid multiple")]
    OffGridShift(f64),

    #[error("weight too close to degenerate: {0}")]
    DegenerateWeight(String),

    #[error("invariant `{invariant}` violated: {value:e} > {tolerance:e}")]
    InvariantViolated {
        invariant: &'static str,
        value: f64,
        tolerance: f64,
    },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, FrameError>;
