//! Command-line driver: flag and config parsing, dispatch, artifact output.

pub mod plan;
pub mod run;

pub use plan::{Cli, Command, ConfigDoc, Format, Mode, RunPlan};
pub use run::{execute, run, Outcome, RunOutput};
