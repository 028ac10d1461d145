use std::path::PathBuf;

use thiserror::Error;

use crate::codec::DecodeError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph size {0} outside supported range 1..={max}", max = crate::graph::MAX_NODES)]
    SizeOutOfRange(usize),

    #[error("node {node} out of range for a {n}-node graph")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("a flip needs two distinct nodes, got ({0}, {0})")]
    SelfLoop(usize),

    #[error("expected a graph of size {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no populated donor slot for size {n} with k in 1..={k_max}")]
    NoDonor { n: usize, k_max: usize },

    #[error("feasible graph on {n} nodes has {edges} edges, above the bound {bound}")]
    BoundViolation {
        n: usize,
        edges: usize,
        bound: usize,
    },

    #[error("episode already finished after {0} steps")]
    EpisodeFinished(usize),

    #[error("sparse6: {0}")]
    Decode(#[from] DecodeError),

    #[error("corrupt archive at {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error at {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn corrupt(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Corrupt {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
