//! Command-line front end: configs, manifests and one runner per
//! experiment. `main.rs` only parses arguments and maps errors to exit
//! codes.

pub mod commands;
pub mod config;
pub mod manifest;

pub use commands::{run, CliError, Outcome};
pub use config::{ConfigError, Experiment, ExperimentConfig, Overrides};
pub use manifest::RunManifest;
