//! The JSON envelope every command prints, and exit-code mapping.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tpa_core::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    pub diagnostics: Vec<String>,
}

impl Report {
    pub fn new(command: &str, inputs: Value, result: Value, diagnostics: Vec<String>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            inputs,
            result,
            diagnostics,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    PropertyFails = 1,
    Usage = 2,
    Budget = 3,
}

/// Error raised by a command, with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            exit: Exit::Usage,
            kind: "usage",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (exit, kind) = match &e {
            Error::Syntax { .. } => (Exit::Usage, "syntax"),
            Error::UnknownName { .. } | Error::DuplicateName { .. } => (Exit::Usage, "name"),
            Error::Type(_) | Error::Arity { .. } => (Exit::Usage, "type"),
            Error::InvalidArgument(_) | Error::OutOfDomain { .. } | Error::NotALoop(_) => (Exit::Usage, "argument"),
            Error::SpaceMismatch(_) | Error::EmptyDomain(_) => (Exit::Usage, "space"),
            Error::SpaceTooLarge { .. } | Error::SearchBudgetExceeded(_) => (Exit::Budget, "budget"),
            Error::NotStronger | Error::NotWeaker => (Exit::PropertyFails, "entailment"),
            Error::MergeConflict { .. } | Error::NonTotalPhi(_) | Error::PartialT(_) => (Exit::PropertyFails, "partial"),
            Error::NotComposable(_) | Error::NotInvertible(_) => (Exit::PropertyFails, "arrow"),
        };
        Failure {
            exit,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}
