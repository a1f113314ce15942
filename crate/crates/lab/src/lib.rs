//! Command-line front end for `bergman-core`: weight and symbol descriptor
//! files, the `bergman-lab` commands, and their JSON/CSV reports.
//!
//! Every report carries `schema_version`; numbers are rounded to 12
//! significant digits so that identical inputs give byte-identical output.

pub mod cli;
pub mod commands;
pub mod descriptor;
pub mod error;
pub mod real;
pub mod report;
pub mod sweep;

pub use commands::{run, Outcome, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK};
pub use error::{LabError, Result};
