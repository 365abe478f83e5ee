//! Command-line front end for `commlab`: configuration parsing, command
//! dispatch and artifact output.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, AlgebraType, RunConfig, Task};
pub use error::CliError;
pub use run::{run, Outcome};
