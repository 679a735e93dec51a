use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid mode (n={n}, m={m}): {reason}")]
    InvalidMode { n: usize, m: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no positive equilibrium in ({lo}, {hi})")]
    NoEquilibrium { lo: f64, hi: f64 },

    #[error("could not bracket {wanted} zeros of J_{n}' below x = {limit}")]
    ZeroBracket { n: usize, wanted: usize, limit: f64 },

    #[error("equilibrium residual {0:e} exceeds tolerance")]
    Residual(f64),

    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64, last_finite: Vec<f64> },

    #[error("solution blew up at t = {time} (|value| > 1e6)")]
    BlowUp { time: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::InvalidMode { .. } => 2,
            Error::Io { .. } => 1,
            _ => 3,
        }
    }
}
