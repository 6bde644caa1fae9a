//! Command-line experiment harness for the conditional KPZ fixed point laws.
//!
//! Each subcommand resolves its configuration completely, computes every record, and
//! only then writes output, so a failing run never leaves a partial file behind.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use config::{Command, ExperimentConfig, Flags, Resolved};
pub use error::{LabError, LabResult};

/// Runs one subcommand from parsed flags and writes its output.
pub fn run(command: Command, flags: &Flags) -> LabResult<()> {
    let cfg = ExperimentConfig::from_flags(flags)?;
    let r = config::resolve(command, &cfg)?;
    if let Some(n) = r.threads {
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let outcome = execute(command, &r)?;
    outcome.report.write(r.out.as_deref(), r.format)?;
    match outcome.convergence_failure {
        Some(msg) => Err(LabError::Convergence(msg)),
        None => Ok(()),
    }
}

/// Computes the report for a resolved configuration without writing it.
pub fn execute(command: Command, r: &Resolved) -> LabResult<commands::Outcome> {
    match command {
        Command::Tw => commands::tw(r),
        Command::Limit => commands::limit(r),
        Command::Converge => commands::converge(r),
        Command::Smalln => commands::smalln(r),
        Command::Sample => commands::sample(r),
    }
}
