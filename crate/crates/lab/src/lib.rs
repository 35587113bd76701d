//! Experiment harness for `qgles-core`: configuration files, on-disk
//! formats and the orchestration behind the `qgles` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod format;
pub mod harness;

pub use config::ExperimentConfig;
pub use error::{LabError, LabResult};
