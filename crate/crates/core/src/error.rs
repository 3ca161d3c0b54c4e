//! Error type shared by every module.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("component mismatch: expected {expected}, got {got}")]
    ComponentMismatch { expected: String, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("broken Hermitian symmetry (imaginary residue {residue:.3e})")]
    Hermitian { residue: f64 },

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("field is not solenoidal (scaled divergence {0:.3e})")]
    NotSolenoidal(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no resolvable shell: {0}")]
    NoResolvableShell(String),

    #[error("singular Vandermonde system for extension order {0}")]
    SingularExtension(usize),

    #[error("tolerance {tol:.3e} not reached (last error estimate {estimate:.3e})")]
    ToleranceNotReached { tol: f64, estimate: f64 },

    #[error("stability guard: dt = {dt:.3e} exceeds limit {limit:.3e} ({reason})")]
    Stability { dt: f64, limit: f64, reason: String },

    #[error("field file format: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
