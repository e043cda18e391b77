//! Process-level error type carrying the exit code.
//!
//! Exit codes: 0 success, 1 invariant or acceptance failure, 2 usage or IO
//! error.

use std::fmt;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> CliError {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    pub fn io(context: &str, err: std::io::Error) -> CliError {
        CliError {
            code: 2,
            message: format!("{context}: {err}"),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<vhd_core::Error> for CliError {
    fn from(err: vhd_core::Error) -> CliError {
        // Core equation/dimension errors reaching the CLI mean bad inputs.
        CliError::usage(err.to_string())
    }
}
