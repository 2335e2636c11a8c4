//! Experiment harness: TOML configuration, the verification suites behind
//! the acceptance criteria, and the commands exposed by the CLI.

pub mod anchors;
pub mod config;
pub mod families;
pub mod oracle;
pub mod report;
pub mod runs;
pub mod suites;

use std::time::Instant;

pub use config::{ExperimentConfig, Suite, VerifySection};
pub use report::{Check, Report};
pub use suites::{Criterion, CRITERIA};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Pipeline,
    Kolmo,
    Entropy,
    Extract,
    Clifford,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Pipeline => "pipeline",
            Command::Kolmo => "kolmo",
            Command::Entropy => "entropy",
            Command::Extract => "extract",
            Command::Clifford => "clifford",
        }
    }
}

/// Validates `cfg` and runs `command`. Configuration problems come back as
/// `Error::Config` before any work is done; everything else is recorded in
/// the report.
pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rep = match command {
        Command::Verify => runs::run_verify(cfg)?,
        Command::Pipeline => runs::run_pipeline(cfg)?,
        Command::Kolmo => runs::run_kolmo(cfg)?,
        Command::Entropy => runs::run_entropy(cfg)?,
        Command::Extract => runs::run_extract(cfg)?,
        Command::Clifford => runs::run_clifford(cfg)?,
    };
    rep.finish(start.elapsed().as_secs_f64());
    Ok(rep)
}

/// Runs the parts behind acceptance criterion `number`.
pub fn run_criterion(number: u8, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rep = runs::run_criterion(number, cfg)?;
    rep.finish(start.elapsed().as_secs_f64());
    Ok(rep)
}
