//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. Precondition violations
//! (bad sites, malformed words, out-of-range parameters) surface as
//! [`Error::InvalidInput`]; the remaining variants mark numerical or I/O
//! failures that can occur on valid inputs.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The cyclic Jacobi eigensolver did not converge.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {offdiag:.3e})")]
    NoConvergence { sweeps: usize, offdiag: f64 },

    /// A density matrix failed the positivity check beyond numerical dust.
    #[error("density matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    /// A peak or crossing search found nothing to report.
    #[error("search failed: {0}")]
    SearchFailed(String),

    /// A configuration document failed validation at `path`.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Shorthand for [`Error::InvalidInput`] built from anything printable.
    pub fn invalid(msg: impl std::fmt::Display) -> Self {
        Error::InvalidInput(msg.to_string())
    }

    /// Shorthand for [`Error::Config`].
    pub fn config(path: impl Into<String>, msg: impl std::fmt::Display) -> Self {
        Error::Config {
            path: path.into(),
            message: msg.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
