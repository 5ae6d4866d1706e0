//! Experiment orchestration and file formats behind the command line.

pub mod commands;
pub mod config;
pub mod experiment;
pub mod output;
pub mod pgm;

pub use commands::{cmd_modes, cmd_oracle, cmd_recover, cmd_run, cmd_sweep};
pub use config::{BasisSource, ExperimentConfig};
pub use experiment::{run_experiment, Bench, RunRecord};
