//! Configuration-driven runs of the disc builders and diagnostics with
//! deterministic artifacts: a TOML report and plot-ready CSV samples.

pub mod config;
pub mod report;
mod run;

pub use config::{Command, ConfigError, Params, RunConfig};
pub use run::{export, run, Diagnostics, Outcome, OutputLock, RunArtifacts, LOCK_NAME};

/// Exit status for configuration errors.
pub const EXIT_INVALID: i32 = 2;
