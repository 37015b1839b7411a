use std::io;

use thiserror::Error;

/// Errors raised by the library. Variants map onto the CLI exit-code scheme:
/// I/O, format and data errors are input problems; domain and compatibility
/// errors are invalid requests; numerical errors are solver failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("compatibility error: {0}")]
    Compatibility(String),

    #[error("numerical error in block l={block}: {message}")]
    Numerical { block: usize, message: String },

    #[error("root bracketing failed for l={l}, s={s}")]
    ZeroBracketing { l: usize, s: usize },

    #[error("refused: {0}")]
    Refused(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn format(offset: u64, msg: impl Into<String>) -> Self {
        Error::Format { offset, message: msg.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
