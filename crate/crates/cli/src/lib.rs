//! Batch front end for `molspin`: configuration files, the molecule
//! registry, scenario pipelines and reproducible run artefacts.

pub mod config;
pub mod error;
pub mod output;
pub mod pipelines;
pub mod registry;
pub mod run;
pub mod schema;

pub use error::{CliError, CliResult};
pub use run::{compute, run, RunOptions};
