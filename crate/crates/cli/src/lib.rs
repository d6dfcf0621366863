//! Library side of the `ramsey` command: problem files, argument
//! resolution, report documents and the four subcommands.

pub mod commands;
pub mod problem;
pub mod report;

pub use commands::{Outcome, EXIT_BUDGET, EXIT_DISAGREE, EXIT_OK, EXIT_OTHER, EXIT_PARSE};
