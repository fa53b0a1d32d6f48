use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),

    #[error("edge ({0}, {1}) has an endpoint outside the roster")]
    UnknownEndpoint(String, String),

    #[error("node `{0}` has no group label")]
    MissingGroup(String),

    #[error("duplicate node `{0}` in roster")]
    DuplicateNode(String),

    #[error("invalid group label `{0}`")]
    InvalidLabel(String),

    #[error("group `{label}` is empty but pair count is {count}")]
    EmptyNormalizer { label: String, count: u64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("roster empty")]
    EmptyRoster,

    #[error("instance too large to enumerate: {dyads} dyads (limit {limit})")]
    TooLarge { dyads: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fit did not converge after {iterations} iterations (best objective {best_objective:.6e}, params {best_params:?})")]
    NonConvergence {
        iterations: usize,
        best_objective: f64,
        best_params: Vec<f64>,
    },

    #[error("fitted AR polynomial is not stationary (spectral radius {0:.6})")]
    NonStationary(f64),

    #[error("not enough history: {0}")]
    InsufficientHistory(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("unknown senator ids: {0:?}")]
    UnknownSenators(Vec<String>),

    #[error("duplicate bill id `{0}`")]
    DuplicateBill(String),

    #[error("cannot open {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
