//! Batch experiments over AES-128 equivalence classes.
//!
//! Every subcommand writes deterministic output for a given
//! `(subcommand, seed, trials, format)`; thread count only changes wall time.

pub mod cli;
pub mod commands;
pub mod error;
pub mod formats;
pub mod hexblock;
pub mod suite;

pub use cli::{run, Cli, RunConfig};
pub use error::CliError;
