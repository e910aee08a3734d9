use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asym:e})")]
    NotSymmetric { max_asym: f64 },

    #[error("matrix is not positive definite: pivot {pivot} has value {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("system is numerically singular (condition estimate {estimate:e})")]
    IllConditioned { estimate: f64 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("internal identity check failed in {context}: lhs {lhs:e} vs rhs {rhs:e}")]
    IdentityCheck {
        context: &'static str,
        lhs: f64,
        rhs: f64,
    },

    #[error("covering certification failed after {doublings} doublings")]
    CertificationFailed { doublings: usize },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("format error at byte offset {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
