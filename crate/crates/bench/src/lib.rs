//! Experiment harness around `ams-core`: seeded ensembles, statistical
//! checks, and CSV/JSON reports. The `ams` binary exposes every experiment as
//! a subcommand.

pub mod config;
pub mod ensemble;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, ExperimentKind, Overrides};
pub use error::{BenchError, Result};
pub use report::{Check, Report};
