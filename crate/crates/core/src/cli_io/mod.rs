//! Command-line front end and curve database parsing.

pub mod commands;
pub mod config;
pub mod parse;

pub use commands::{run_command, Cli, EXIT_INCONSISTENCY, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};
pub use config::{OutputFormat, RunConfig};
pub use parse::{parse_curve_file, parse_curve_line, parse_curves, BUILTIN_CURVES};
