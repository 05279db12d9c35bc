use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by graph construction, I/O and the estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({u}, {v}) is a self-loop")]
    SelfLoop { u: u32, v: u32 },

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: u32, n: usize },

    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: u32, v: u32 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A documented precondition of an operation was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Coarse estimation exhausted its grid even after a reseeded retry.
    #[error("coarse estimation produced no estimate after retry")]
    NoCoarseEstimate,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
