//! Configuration, experiment runner and report formatting for the `shadows`
//! binary.

pub mod config;
pub mod error;
pub mod experiment;
pub mod format;
pub mod table;

pub use config::{ExperimentConfig, Overrides};
pub use error::CliError;
