//! `cslheat` command-line front end: scenario configs, sweeps and table output.

pub mod commands;
pub mod error;
pub mod scenario;
pub mod table;

pub use error::{CliError, Result};
