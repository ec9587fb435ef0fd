use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
    #[error(transparent)]
    Core(#[from] orbitsieve_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation { .. } => "validation",
            CliError::Core(e) if e.is_resource_exhaustion() => "resource_exhausted",
            CliError::Core(_) => "computation",
            CliError::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "validation" => EXIT_VALIDATION,
            "resource_exhausted" => EXIT_RESOURCE,
            _ => EXIT_FAILURE,
        }
    }

    /// One JSON object on one line.
    pub fn to_json_line(&self) -> String {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        if let CliError::Validation { field, message } = self {
            body["field"] = json!(field);
            body["message"] = json!(message);
        }
        json!({ "error": body }).to_string()
    }
}

macro_rules! core_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        })*
    };
}

core_from!(
    orbitsieve_core::orbit::OrbitError,
    orbitsieve_core::modular::ModularError,
    orbitsieve_core::sieve::SieveError,
    orbitsieve_core::experiments::ExperimentError,
    orbitsieve_core::coordinate::CoordinateError
);
