//! Standard-library companion to `lacuna-core`: algebra and measure file
//! formats, experiment configuration, deterministic result reports and the
//! drivers behind the `lacuna` command-line tool.

pub mod app;
pub mod config;
pub mod drivers;
pub mod error;
pub mod io;
pub mod plot;
pub mod report;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
