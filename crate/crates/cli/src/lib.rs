//! Batch driver for the `heunband` pipelines: JSON configurations in,
//! deterministic JSON/CSV reports and plot data out.

pub mod app;
pub mod config;
pub mod output;
pub mod pipeline;

pub use app::main_with_args;
pub use config::{RunConfig, ValidConfig};
pub use pipeline::{Outcome, Report, Status, Verdict};
