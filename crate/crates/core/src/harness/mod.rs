//! Experiment configuration, orchestration and CSV/manifest output.

pub mod config;
pub mod experiments;
pub mod record;

pub use config::{build_config, parse_config, Experiment, ExperimentConfig, Variant};
pub use experiments::run_experiment;
pub use record::{Cell, RunOutcome, RunRecord, Table};
