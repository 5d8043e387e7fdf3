//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by simulation, graph construction, training, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("two-qubit gate requires distinct qubits (got {qubit} twice)")]
    DuplicateQubits { qubit: usize },

    #[error("cannot encode an all-zero vector: no valid normalization exists")]
    ZeroVector,

    #[error("node {node} has an all-zero feature row")]
    ZeroFeatureRow { node: usize },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("edge at {path}:{line} references unknown node id {id}")]
    DanglingEdge { id: u64, path: String, line: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("training aborted: non-finite loss ({loss}) at epoch {epoch}")]
    NonFiniteLoss { epoch: usize, loss: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by invalid inputs or configuration, as opposed
    /// to runtime/numerical failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::NonFiniteLoss { .. } | Error::Io { .. })
    }
}
