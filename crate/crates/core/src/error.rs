use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{function} has a pole at {at}")]
    Pole { function: &'static str, at: String },

    #[error("overflow guard tripped in {0}")]
    Overflow(&'static str),

    #[error("insufficient q-expansion precision: need {required}, have {available}")]
    InsufficientPrecision { required: usize, available: usize },

    #[error("near-degenerate Hecke eigenvalues at weight {weight} (gap {gap:.3e})")]
    Degenerate { weight: u32, gap: f64 },

    #[error("coefficient service does not cover prime {0}")]
    MissingPrime(u64),

    #[error("quadrature for {what} did not converge (node doubling moved the result by {change:.3e})")]
    NonConvergence { what: &'static str, change: f64 },

    #[error("numerical contract violated: {0}")]
    Contract(String),

    #[error("missing form: {0}")]
    MissingForm(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
