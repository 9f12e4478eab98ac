//! Configuration, mesh IO, experiment runners and report writers around
//! `steklov-core`. The `steklov` binary is a thin layer over [`commands::run`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod meshio;
pub mod output;
pub mod pool;
pub mod svg;

pub use commands::{run, Context};
pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{LabError, LabResult, EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, EXIT_TOLERANCE};
pub use output::Artifacts;
