//! Library half of the `dpap` command-line tool: argument definitions, file
//! formats, and the operations behind each subcommand. The binary is a thin
//! shell over [`ops`]; integration tests and the acceptance suite call the
//! same functions in-process.

pub mod args;
pub mod error;
pub mod formats;
pub mod ops;

pub use error::CliError;
