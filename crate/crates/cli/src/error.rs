use std::fmt;

use rae_core::Error;

/// Exit status 1 for configuration or input problems, 2 for failures while
/// computing or writing results.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parse { .. }
            | Error::InconsistentLength { .. }
            | Error::NonFiniteCoefficient { .. }
            | Error::InvalidArgument(_)
            | Error::InfeasibleTermCount { .. }
            | Error::NoNonIdentityTerms
            | Error::Json(_) => CliError::Config(msg),
            Error::EvidenceUnderflow(_)
            | Error::Empty(_)
            | Error::DistanceOutOfRange { .. }
            | Error::FitDidNotConverge(_)
            | Error::NoValidRaePoint => CliError::Runtime(msg),
        }
    }
}
