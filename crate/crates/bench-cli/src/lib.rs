//! Experiment driver: JSON configurations in, one CSV row per run out, plus
//! MPX statistics, scaling sweeps and single-graph verification.

pub mod commands;
pub mod config;
pub mod error;
pub mod metrics;
pub mod scaling;

pub use commands::{mpx_report, run_experiment, run_sweep, verify_file, verify_graph, MpxReport, Verification};
pub use config::{load, DelaySpec, Envelope, ExperimentConfig, GraphSpec, OutputSpec, SweepConfig, WakeupSpec};
pub use error::CliError;
pub use metrics::{measure, read_csv, write_csv, MetricsRow, CSV_HEADER};
pub use scaling::{fit_line, message_constant, summarize, time_constant, ScalingSummary, MAX_POWER_OF_N};
