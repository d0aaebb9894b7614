//! Command-line front end for `rydberg-cavity-core`: parameter files,
//! single-point reports, parameter scans, `g2(tau)` traces and oracle checks.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;

pub use config::{load, Config, ConfigBuilder};
pub use error::{CliError, ConfigError};
