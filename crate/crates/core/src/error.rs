//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong between reading an instance and printing a
/// packing.  Variants carry enough context to point at the offending line,
/// item or node without keeping a backtrace around.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("backend returned invalid solution: {0}")]
    InvalidSolution(String),

    #[error("solution extraction failed: {0}")]
    Extraction(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}
