//! File formats, reference fixtures, the desk corpus and pipeline
//! orchestration behind the `permendo` command.

pub mod corpus;
pub mod commands;
pub mod crosscheck;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod pipeline;
pub mod render;
pub mod scenario;

pub use error::{CliError, Result};
