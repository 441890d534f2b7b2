//! Command-line front end: weight ingestion, single evaluations, oracle
//! cross-checks and convergence sweeps written as delimited reports.

pub mod commands;
pub mod error;
pub mod parse;
pub mod report;

pub use commands::run;
pub use error::{CliError, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
