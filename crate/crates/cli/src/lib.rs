//! File formats, reports and the command-line front end of `vnfperf`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;
pub mod input;
pub mod manifest;
pub mod parallel;

pub use error::{exit, CliError};
