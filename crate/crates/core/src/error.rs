use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = PandaError> = std::result::Result<T, E>;

/// Errors raised anywhere in the toolkit.
///
/// Variants fall into three families that the CLI maps onto distinct exit
/// codes: data problems, model problems, and caller misuse.
#[derive(Debug, Error)]
pub enum PandaError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invariant violated by sample {sample}: {message}")]
    Invariant { sample: String, message: String },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error("missing labels: {0}")]
    MissingLabels(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("missing feature {0:?}")]
    MissingFeature(String),

    #[error("no reserve-station entry for DecodeWidth {0}")]
    MissingLookup(u32),

    #[error("format version mismatch: expected {expected:?}, found {found:?}")]
    VersionMismatch { expected: String, found: String },

    #[error("corrupt payload: {0}")]
    CorruptPayload(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no feasible candidate: {0}")]
    NoFeasible(String),
}

/// Coarse error family, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Model,
}

impl PandaError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            PandaError::InvalidArgument(_) => ErrorKind::Usage,
            PandaError::VersionMismatch { .. }
            | PandaError::CorruptPayload(_)
            | PandaError::Model(_)
            | PandaError::MissingFeature(_) => ErrorKind::Model,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PandaError::Io {
            path: path.into(),
            source,
        }
    }
}
