//! Command-line front end for the `exceedance` library.

pub mod commands;
pub mod error;
pub mod format;
pub mod input;
pub mod plot;

pub use commands::{run, Cli, Command};
pub use error::CliError;
