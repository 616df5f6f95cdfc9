//! File formats, parallel simulation and the command-line front end for
//! `mnar-bounds`.

pub mod args;
pub mod commands;
pub mod error;
pub mod formats;
pub mod parallel;

pub use error::{CliError, CliResult};
