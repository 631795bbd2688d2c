//! polylab: a config-driven experiment harness over the exact-arithmetic
//! core. Configs are flat `key = value` text, one scenario per file; output
//! is a fixed-schema CSV plus a human-readable summary. Fixing the config
//! and seed fixes the CSV byte for byte, independent of thread count.

pub mod config;
pub mod report;
pub mod run;

pub use config::{validate_config, ExperimentConfig, Scenario};
pub use report::{fmt_f64, CsvReport, CsvRow, CSV_HEADER};
pub use run::{plan, run_experiment, RunError, RunOptions, RunOutcome};
