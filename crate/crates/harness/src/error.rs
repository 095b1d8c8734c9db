use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Malformed or invalid experiment configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{0}")]
    Geometry(sla_esprit::Error),
    #[error("cannot read config {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
}

/// Least-squares slope fitting failures.
#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points for a slope fit, got {0}")]
    TooFewPoints(usize),
    #[error("log-log fit needs positive coordinates, got ({x}, {y})")]
    NonPositive { x: f64, y: f64 },
    #[error("all abscissae coincide")]
    Degenerate,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("estimation failed: {0}")]
    Estimation(#[from] sla_esprit::Error),
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },
    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl HarnessError {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(ConfigError::Geometry(_)) => 4,
            HarnessError::Config(_) => 3,
            HarnessError::Estimation(sla_esprit::Error::Geometry(_)) => 4,
            HarnessError::Estimation(_) | HarnessError::Fit(_) => 5,
            HarnessError::Output { .. } | HarnessError::Csv(_) => 6,
            HarnessError::ThreadPool(_) => 7,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
