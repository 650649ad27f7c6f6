//! Error type shared across the crate.

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type.
///
/// Variants are coarse on purpose: callers almost always either print the
/// message or branch on "bad input vs. bad file", and the message carries the
/// specifics (offending value, expected range, line number, ...).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition (empty series, window
    /// too large, non-finite value, probability outside `(0, 1)`, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input data admits no meaningful answer (e.g. a constant series has
    /// zero overall variance, so a variance-ratio statistic is undefined).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A stored null distribution does not match the data or scan
    /// configuration it is being used with.
    #[error("null distribution mismatch: {0}")]
    NullMismatch(String),

    /// A persisted file is syntactically or semantically malformed.
    /// `line` is the 1-based physical line number in the file.
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    /// An underlying I/O failure, with the path that was being accessed.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A conditional simulation exhausted its attempt budget without
    /// producing enough accepted replicates.
    #[error("attempt budget exhausted: {0}")]
    AttemptBudget(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateInput(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::NullMismatch(msg.into())
    }

    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
