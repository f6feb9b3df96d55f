use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by loading, scoring, and analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Segment files of one corpus disagree on line count.
    #[error("{file}: expected {expected} segments, found {found}")]
    Alignment {
        file: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate entry for {0}")]
    DuplicateKey(String),

    #[error("raw score {0} outside [0,100]")]
    ScoreOutOfRange(f64),

    #[error("no data for system {0}")]
    MissingSystem(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {needed} {what}, found {found}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        found: usize,
    },

    /// Pearson correlation is undefined for the given inputs (zero variance).
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The correlation triple handed to the Williams test does not form a
    /// positive semi-definite matrix.
    #[error("invalid correlation matrix (K = {k})")]
    InvalidCorrelationMatrix { k: f64 },

    #[error("empty reference segment at index {0}")]
    EmptyReference(usize),

    #[error("bootstrap rejected {rejected} resamples, more than 10% of {requested}")]
    BootstrapRejection { rejected: usize, requested: usize },

    /// A set of pair decisions does not cover every (pair, metric) cell.
    #[error("pair coverage mismatch: {0}")]
    CoverageMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
