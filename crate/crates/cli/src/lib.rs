//! Library surface of the `stark-spectra` command-line tool, split out so
//! the integration tests can drive configs and runs directly.

pub mod config;
pub mod modes;
pub mod output;

pub use config::{parse_config, Mode, RunConfig};
pub use modes::{run, RunError};
