use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input to {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: String, right: String },
    #[error("operation needs {expected} but got {got}")]
    WrongGroup { expected: String, got: String },
    #[error("test battery is empty")]
    EmptyBattery,
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shift {0} is not a multiple of the grid spacing")]
    OffLattice(f64),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("gaussian is not integrable in variable {0}")]
    NotIntegrable(usize),
    #[error("factorization residual {0:e} exceeds tolerance")]
    FactorNotConverged(f64),
    #[error("variant mismatch: {0}")]
    VariantMismatch(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: &'static str, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
