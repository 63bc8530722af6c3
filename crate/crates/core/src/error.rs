use thiserror::Error;

/// Errors produced by construction and evolution routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian: ||M - M'|| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("state is not normalized: ||psi||^2 = {0}")]
    NotNormalized(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("schedule has no cycle structure (standard EIT is unmodulated)")]
    NoCycle,

    #[error("formula evaluated outside its regime: {0}")]
    OutOfRegime(String),

    #[error("time series: {0}")]
    Series(String),

    #[error("trace collapsed to {0:.3e} before renormalization (overdamped regime)")]
    TraceCollapse(f64),

    #[error("empty grid")]
    EmptyGrid,

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
