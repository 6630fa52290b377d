//! Experiment harness around the `sno` optimizer: multi-trial runs with
//! CSV/JSON output, rank and Wilcoxon comparison of result directories,
//! and plot-ready dumps of net snapshots.

pub mod compare;
pub mod config_file;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod plotdata;

pub use error::{CliError, Result};
pub use experiment::{cmd_run, ExperimentSpec};
