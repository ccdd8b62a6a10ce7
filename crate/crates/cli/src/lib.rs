//! `dissipaq` command-line front end: configuration, sweeps and CSV output.

pub mod config;
pub mod run;
pub mod table;

pub use config::{parse_args, Command, ConfigError, Parsed, RunConfig};
pub use run::{run, RunError};
pub use table::{Cell, ResultTable};
