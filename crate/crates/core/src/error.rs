use thiserror::Error;

/// Errors raised by the solvers, the simulator and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The equation being solved has no solution for the given arguments.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// A numerical procedure failed (bracket expansion, verification residuals).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The finite-horizon enumeration would exceed the configured cap.
    #[error(
        "capacity error: horizon {horizon} exceeds the cap of {max}; \
         enumeration visits 2^N processed-task sets, i.e. {candidates} candidates"
    )]
    Capacity { horizon: usize, max: usize, candidates: f64 },

    /// A simulation stage failed; carries the one-based stage index.
    #[error("stage {stage}: {source}")]
    Stage { stage: usize, source: Box<Error> },

    /// Invalid scenario configuration. The message names the offending field.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn no_solution(msg: impl Into<String>) -> Self {
        Error::NoSolution(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// The error with any stage wrapper removed.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root_cause(),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
