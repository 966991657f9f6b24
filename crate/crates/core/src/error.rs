use std::path::PathBuf;

use thiserror::Error;

use crate::learning::LearningError;
use crate::memory::{MemoryError, MemoryFileError};
use crate::proximity::ProximityError;
use crate::retrieval::RetrievalError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Memory(#[from] MemoryError),
    #[error("{path}: {source}")]
    MemoryFile {
        path: PathBuf,
        #[source]
        source: MemoryFileError,
    },
    #[error(transparent)]
    Proximity(#[from] ProximityError),
    #[error("{path}: {source}")]
    ProximityFile {
        path: PathBuf,
        #[source]
        source: ProximityError,
    },
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Learning(#[from] LearningError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot draw {memories} distinct memories of length {nodes}: at most {capacity} exist up to complement")]
    Capacity {
        nodes: usize,
        memories: usize,
        capacity: u128,
    },
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// Stable machine-readable category, used as the CLI error prefix.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Memory(_) => "memory",
            Error::MemoryFile { .. } => "memory_file",
            Error::Proximity(_) => "proximity",
            Error::ProximityFile { .. } => "proximity_file",
            Error::Retrieval(_) => "retrieval",
            Error::Learning(_) => "learning",
            Error::Io { .. } => "io",
            Error::Capacity { .. } => "capacity",
            Error::InvalidSpec(_) => "spec",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
