use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants group into the CLI exit-code classes: validation (2),
/// capacity (3) and numerical convergence (4).
#[derive(Debug, Error)]
pub enum MagicError {
    #[error("dimension mismatch: expected {expected} qubits, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("capacity exceeded: {what} (requested {requested}, limit {limit})")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("filtered witness undefined for the maximally mixed state")]
    FilteredUndefined,

    #[error("invalid operation: {0}")]
    InvalidOp(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("DMRG did not converge after {sweeps} sweeps (last energy change {last_delta:e})")]
    NoConvergence { sweeps: usize, last_delta: f64 },

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MagicError {
    pub fn domain(msg: impl Into<String>) -> Self {
        MagicError::Domain(msg.into())
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            MagicError::Capacity { .. } => 3,
            MagicError::NoConvergence { .. } | MagicError::LinearProgram(_) => 4,
            MagicError::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, MagicError>;
