//! Configuration, initial data and experiment orchestration for the `ikfp` command.

pub mod config;
pub mod experiment;
pub mod initial;

pub use config::{parse_config, ConfigError, ConfigErrors, ExperimentConfig, Kind};
pub use experiment::{run_experiment, Outcome};
pub use initial::build_initial;
