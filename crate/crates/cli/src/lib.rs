//! Command-line front end for `netform-core`: configuration parsing, named
//! experiment presets and CSV/JSON output.

pub mod config;
pub mod presets;
pub mod report;

pub use config::{parse_config, Command, ConfigError, ExperimentConfig, Format, Model, RuleName};
pub use presets::{Preset, PRESETS};
pub use report::{run_experiment, write_outputs, Report};
