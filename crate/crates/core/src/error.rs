use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. Checkpoint problems get their own enum so
/// callers can tell a stale or corrupt resume file apart from everything else.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scaled operand needs {needed} bits, exceeding the bit budget of {budget}")]
    BitBudget { needed: u64, budget: u64 },

    #[error("scan ceiling {0} is unsupported (must be below 2^32)")]
    UnsupportedCeiling(u64),

    #[error("prime pool must hold at least one prime")]
    EmptyPool,

    #[error("factorial state is already at the scan ceiling {0}")]
    CeilingExceeded(u64),

    #[error("exact factorial of {n} exceeds the configured ceiling {ceiling}")]
    ExactCeiling { n: u64, ceiling: u64 },

    #[error("n = {0} is not a solution of n! + 1 = m^2")]
    NotASolution(u64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CheckpointError {
    #[error("unknown checkpoint version line {0:?}")]
    VersionMismatch(String),

    #[error("checkpoint checksum mismatch (stored {stored:08x}, computed {computed:08x})")]
    ChecksumMismatch { stored: u32, computed: u32 },

    #[error("checkpoint was written for a different prime pool")]
    PoolMismatch,

    #[error("malformed checkpoint: {0}")]
    Malformed(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
