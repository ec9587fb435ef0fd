//! Library half of the `orbitsieve` binary: configuration, dispatch and
//! report writing, kept separate so integration tests can drive it directly.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{dispatch, Command};
pub use config::{parse_config, RunConfig};
pub use error::CliError;
