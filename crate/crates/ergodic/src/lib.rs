//! File formats and the command-line front end of `ergodic-core`.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure, 4 unresolved
//! limit classification.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod formats;

pub use error::{CliError, CliResult};
