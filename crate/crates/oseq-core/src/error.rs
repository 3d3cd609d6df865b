//! Crate-wide error type.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An exhaustive-search routine was asked for more than its configured cap.
    #[error("budget exceeded: {what} = {requested} is over the cap of {cap}")]
    Budget {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    /// Invalid argument or out-of-domain input.
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("i/o error{}: {source}", path_suffix(.path))]
    Io {
        #[source]
        source: std::io::Error,
        path: Option<PathBuf>,
    },

    /// Malformed dataset / report file, with a 1-based line number.
    #[error("{path}:{line}: {msg}")]
    Format {
        path: String,
        line: usize,
        msg: String,
    },

    /// Checkpoint file rejected (bad magic/version, wrong cap, truncation).
    #[error("checkpoint rejected: {0}")]
    Checkpoint(String),
}

fn path_suffix(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!(" ({})", p.display()),
        None => String::new(),
    }
}

impl From<std::io::Error> for Error {
    fn from(source: std::io::Error) -> Self {
        Error::Io { source, path: None }
    }
}

impl Error {
    pub fn io(source: std::io::Error, path: impl Into<PathBuf>) -> Self {
        Error::Io {
            source,
            path: Some(path.into()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
