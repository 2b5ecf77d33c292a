use thiserror::Error;

/// Errors raised by network construction and the numerical routines.
///
/// The variants map onto the CLI exit codes: `Domain` -> 1, `Parse` and
/// `Structure` -> 2, `Convergence` -> 3.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid value for an otherwise well-formed input (nonpositive
    /// temperature, unknown state id, empty committor boundary set, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid input: dangling endpoints, self-loops,
    /// disconnected networks where connectivity is required.
    #[error("structural error: {0}")]
    Structure(String),

    /// Malformed catalog or table file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An iterative solver failed to reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }

    /// Process exit code for this error under the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 1,
            Error::Structure(_) | Error::Parse { .. } | Error::Io(_) => 2,
            Error::Convergence(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
