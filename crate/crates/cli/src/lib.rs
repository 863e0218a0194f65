//! Experiment runner for the `coopsense` library: JSON sweep specs in, CSV
//! result tables out.

pub mod error;
pub mod run;
pub mod spec;

pub use error::{CliError, Diagnostic, Result};
pub use run::{render_csv, run_experiment, summary, Overrides, Row, RunReport, CSV_HEADER};
pub use spec::{ExperimentSpec, SweepAxis};
