//! Experiment runner, file formats and command-line front end for the
//! `ihc-core` simulation engine.

pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod parallel;

pub use config::{Experiment, Overrides, Preset, Settings};
pub use error::{CliError, Result};
pub use io::Format;
