use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what} in {path}: {detail}")]
    Malformed {
        what: &'static str,
        path: PathBuf,
        detail: String,
    },

    #[error("non-finite sample at index {index}")]
    NonFiniteSample { index: usize },

    #[error("missing sample rate for headerless signal {0}")]
    MissingSampleRate(PathBuf),

    #[error("label out of range: {field} = {value}")]
    LabelOutOfRange { field: &'static str, value: String },

    #[error("duplicate configuration id {0:?}")]
    DuplicateId(String),

    #[error("empty signal")]
    EmptySignal,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("zero variance in {0}")]
    ZeroVariance(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("need at least two classes, got {0}")]
    SingleClass(usize),

    #[error("solver did not converge within {iterations} iterations (gap {gap:.3e})")]
    NotConverged { iterations: usize, gap: f64 },

    #[error("{feature}: {source}")]
    Feature {
        feature: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(
        what: &'static str,
        path: impl Into<PathBuf>,
        detail: impl Into<String>,
    ) -> Self {
        Error::Malformed {
            what,
            path: path.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn in_feature(self, feature: &'static str) -> Self {
        Error::Feature {
            feature,
            source: Box::new(self),
        }
    }
}
