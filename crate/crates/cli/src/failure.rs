use std::process::ExitCode;

use casimir_core::Error;

/// Why a run did not exit 0.
#[derive(Debug)]
pub enum Failure {
    /// A check ran and did not pass.
    Verification(String),
    Invalid(String),
    Ambiguous(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Verification(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Ambiguous(_) => 3,
        })
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Invalid(m) | Failure::Ambiguous(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Degeneracy(_) | Error::NotHermitian(_) => Failure::Ambiguous(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(format!("i/o: {e}"))
    }
}
