//! Command implementations behind the `cellmark` binary.

pub mod bench;
pub mod commands;
pub mod error;
pub mod imageio;
pub mod keyfile;

pub use error::{CliError, Result};
