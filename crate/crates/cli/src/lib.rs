//! Configuration-driven experiment runner over `korn-core`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod report;
pub mod runner;
pub mod table;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{LabError, Result};
pub use experiments::RunSettings;
pub use report::{Assertion, FitSummary, RunReport, Series};
pub use runner::run;
