//! File formats, configuration, report rendering and the command pipelines
//! behind the `basel` binary.

pub mod config;
pub mod disclosure;
pub mod error;
pub mod input;
pub mod report;
pub mod run;
pub mod tables;

pub use config::{EngineConfig, Overrides, Regime};
pub use error::{CliError, Result};
pub use run::{run_compare, run_compute, CompareOutcome, ComputeOutcome, Engine, Inputs};

/// Exit status for a completed run.
pub fn exit_code(compliant: bool) -> u8 {
    if compliant {
        0
    } else {
        1
    }
}

/// Exit status for any input or configuration error.
pub const ERROR_EXIT: u8 = 2;
