use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("vector is not exactly normalized")]
    NotNormalized,
    #[error("Kraus operators do not sum to the identity under K\u{2020}K")]
    NotTracePreserving,
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("arity mismatch: expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("channel index {index} out of range for {n} channels")]
    InvalidIndex { index: usize, n: usize },
    #[error("wrong target kind: {0}")]
    WrongTarget(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    /// Deliberate desk-scale refusals (policy length, dimension, budget).
    #[error("guard violated: {0}")]
    Guard(String),
}

pub type Result<T> = std::result::Result<T, Error>;
