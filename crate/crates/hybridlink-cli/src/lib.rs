//! Configuration ingestion, result serialization, and the command surface
//! of the `hybridlink` CLI.

pub mod config;
pub mod manifest;
pub mod plot;
pub mod report;
pub mod runner;
pub mod table;

pub use config::{ConfigError, EtaSource, RunConfig};
pub use runner::{CliError, GridOverride, Options, Outcome, OutputFormat};
