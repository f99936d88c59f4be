//! Library behind the `caseflow` binary: scenario-file ingestion, trace
//! rendering, and the subcommand surface.

pub mod emit;
pub mod scenario;

mod commands;

pub use commands::{run, Cli, Command, FormatArg, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
