use std::fmt;

use kms_dynamics::Error;

/// Process exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Config = 2,
    Inconclusive = 3,
    Unsupported = 4,
    Io = 5,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// The more severe of two statuses, for commands that collect several.
    pub fn worst(self, other: Status) -> Status {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            status: Status::Config,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            status: Status::Io,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn status_of(e: &Error) -> Status {
    match e {
        Error::Parse { .. } | Error::UnboundParameter { .. } | Error::DegenerateMap(_) | Error::Precondition(_) => {
            Status::Config
        }
        Error::Unsupported(_) => Status::Unsupported,
        Error::BudgetExceeded { .. }
        | Error::Inconclusive { .. }
        | Error::NotSummable(_)
        | Error::DegeneratePath(_)
        | Error::NotInjective { .. }
        | Error::InsufficientDepth(_)
        | Error::Internal(_) => Status::Inconclusive,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            status: status_of(&e),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
