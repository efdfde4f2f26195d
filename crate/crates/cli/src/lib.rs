//! Experiment runner for the sliding-correlator simulator: scenario files,
//! named presets and the CSV/JSON artifacts each experiment writes.

// `!(x > 0.0)` style guards reject NaN too, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod presets;
pub mod report;
pub mod run;

pub use config::{Experiment, Mode, ScenarioConfig};
pub use error::CliError;
pub use report::{emit_pdp_csv, emit_report_json, Report};
pub use run::{execute, run, Artifacts, RunOptions};
