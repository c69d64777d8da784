//! Command-line front end: configuration, CSV output and the subcommands.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Command, InitialKind, Method, NoiseKind, RunConfig};
pub use error::{CliError, Result};
pub use output::Table;
pub use run::{run, Outcome};
