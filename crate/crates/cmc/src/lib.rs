//! File formats, configuration, parallel grid integration and the `cmc`
//! command-line front end for `cmc-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;

pub use error::CliError;
