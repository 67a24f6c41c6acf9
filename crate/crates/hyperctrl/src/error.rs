//! Crate-wide error type and exit-code mapping for the CLI.

use thiserror::Error;

/// Coarse error class, used by the CLI to pick a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: bad spec file, invalid operator, dimension mismatch.
    Input,
    /// A configured cap or budget blocked the computation.
    Resource,
    /// The two controllability routes disagreed where they must not.
    Inconsistency,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unknown Pauli label {0:?} (expected one of I, X, Y, Z)")]
    UnknownPauli(String),

    #[error("{context}: matrix is not Hermitian (max |M - M^†| entry = {deviation:.3e})")]
    NotHermitian { context: String, deviation: f64 },

    #[error("generator {index} is not skew-Hermitian (max |M + M^†| entry = {deviation:.3e})")]
    NotSkewHermitian { index: usize, deviation: f64 },

    #[error("{path}: {message}")]
    Spec { path: String, message: String },

    #[error("invalid hypergraph: {0}")]
    Hypergraph(String),

    #[error("{0}")]
    Syntax(String),

    #[error("{0}")]
    Resource(String),

    #[error(
        "Lie closure incomplete after {commutators} commutator evaluations; \
         classification refused (budget exhausted)"
    )]
    IncompleteBasis { commutators: usize },

    #[error("cross-validation inconsistency: {0}")]
    Inconsistency(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Resource(_) | Error::IncompleteBasis { .. } => ErrorKind::Resource,
            Error::Inconsistency(_) => ErrorKind::Inconsistency,
            _ => ErrorKind::Input,
        }
    }

    /// CLI exit code: 0 verdict, 1 input error, 2 resource/budget, 3 inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Input => 1,
            ErrorKind::Resource => 2,
            ErrorKind::Inconsistency => 3,
        }
    }

    pub(crate) fn spec(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec { path: path.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
