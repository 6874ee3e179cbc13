use std::fmt;

/// Errors reported by the library.
///
/// `Capacity` is distinct from `Arg` on purpose: callers (in particular the
/// CLI) map bad input and exceeded guardrails to different exit codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed argument or violated precondition.
    Arg(String),
    /// Text input could not be parsed; `line` is 1-based.
    Parse { line: usize, msg: String },
    /// A documented guardrail (universe size, arity, search budget) was exceeded.
    Capacity(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Arg(msg) => write!(f, "{msg}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::Capacity(msg) => write!(f, "capacity exceeded: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Arg(msg.into()))
}

pub(crate) fn capacity_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capacity(msg.into()))
}
