use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report. The CLI maps each variant onto a
/// distinct process exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// The caller passed arguments that violate an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// A mathematically undefined request, such as inverting zero.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured size cap would be exceeded.
    #[error("resource cap exceeded: {what} is {got}, cap is {cap}")]
    Resource {
        what: &'static str,
        cap: usize,
        got: usize,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A numerical routine failed in a way that should not happen for valid
    /// input.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
