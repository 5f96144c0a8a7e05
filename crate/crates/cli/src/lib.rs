//! Command-line front end: operator spec files, subcommands and sweeps.

mod app;
pub mod output;
pub mod spec;
pub mod sweep;

pub use app::{resolve_jobs, run, Cli, Command, EXIT_NUMERICAL, EXIT_OK, EXIT_SPEC, EXIT_USAGE};
pub use spec::{operator_to_spec, parse_operator_spec, OperatorSpec, SpecError};
