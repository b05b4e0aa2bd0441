//! Error type shared by every subcommand, mapped onto process exit codes.

use std::fmt;

/// Process exit codes: `0` success, `1` usage error (bad flags or flag
/// combinations), `2` data error (unreadable, malformed, or inconsistent
/// input files), `3` a run that failed to converge under `--strict`.
#[derive(Debug)]
pub enum CliError {
    /// The invocation itself is wrong: unknown values, incompatible flags.
    Usage(String),
    /// The inputs could not be read or do not form a valid problem.
    Data(String),
    /// `--strict` was set and the solver stopped without converging.
    StrictNonConvergence { algorithm: String, iterations: usize },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    /// The exit code the process should terminate with for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::StrictNonConvergence { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Data(msg) => write!(f, "{msg}"),
            CliError::StrictNonConvergence {
                algorithm,
                iterations,
            } => write!(
                f,
                "{algorithm} did not converge within {iterations} iterations (strict mode)"
            ),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dpap_core::Error> for CliError {
    fn from(e: dpap_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
