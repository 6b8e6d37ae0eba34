use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch { expected: usize, actual: usize, context: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported quadrature degree {0}")]
    UnsupportedQuadrature(usize),

    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    /// No nonzero pivot candidate was left in column `pivot` of the permuted matrix.
    #[error("matrix is singular: zero pivot at elimination step {pivot}")]
    SingularMatrix { pivot: usize },

    #[error("solve produced non-finite values ({0})")]
    NonFinite(&'static str),

    #[error("solver failure in sample {sample}, mode {mode}: {source}")]
    SampleSolve {
        sample: usize,
        mode: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Config { path: PathBuf, line: usize, message: String },

    #[error("matrix market: {0}")]
    MatrixMarket(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn mismatch(expected: usize, actual: usize, context: &'static str) -> Self {
        Error::DimensionMismatch { expected, actual, context }
    }

    /// True for errors produced by numerical solves rather than bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::SingularMatrix { .. } | Error::NonFinite(_) | Error::SampleSolve { .. })
    }
}
