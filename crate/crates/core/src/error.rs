use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A probability or probability sum outside `[0, 1]`.
    #[error("invalid probability for {field}: {value}")]
    InvalidProbability { field: String, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed model file: {0}")]
    Model(String),

    #[error("database row {row}: {message}")]
    DatabaseRow { row: usize, message: String },

    #[error("database has no entry for d={d}, r0={r0}, r1={r1}, p2={p2}")]
    MissingEntry {
        d: u32,
        r0: String,
        r1: String,
        p2: String,
    },

    /// Extrapolation requested where the fitted ratios are not below one.
    #[error("extrapolation invalid at/above threshold ({0})")]
    AboveThreshold(String),

    /// No distance up to the scan limit reaches the requested rate.
    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("decoder: {0}")]
    Decoder(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error comes from bad input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::AboveThreshold(_) | Error::NoSolution(_) | Error::Decoder(_))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_probability(field: &str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidProbability {
            field: field.to_string(),
            value,
        })
    }
}

/// Sums of exactly representable channel entries may land a few ulps above one.
pub(crate) const SUM_SLACK: f64 = 1e-12;
