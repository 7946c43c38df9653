//! Closed-loop episode runner, JSONL logs, suites and reports.

mod camera;
mod episode;
mod log;
mod report;

pub use camera::{render_bev, BEV_M_PER_PX, BEV_SIZE_PX};
pub use episode::{run_episode, run_spec, PolicyKind, RunConfig, MAX_CONSECUTIVE_FAILURES};
pub use log::{EpisodeLog, LogEnd, LogHeader, LogLine, TerminalCause, TickRecord, LOG_SCHEMA_VERSION};
pub use report::{build_report, read_logs, report, Report};

use crate::scenario::{catalog_names, ScenarioError};
use crate::world::WorldError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("scenario error: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("world error: {0}")]
    World(#[from] WorldError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("no episode logs in {}", .0.display())]
    NoLogs(PathBuf),
}

/// Runs every named scenario under `base` (its `scenario` field is ignored),
/// one thread per episode. Results come back in input order.
pub fn run_suite(base: &RunConfig, scenarios: &[String]) -> Vec<Result<EpisodeLog, HarnessError>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|name| {
                let cfg = RunConfig { scenario: name.clone(), ..base.clone() };
                s.spawn(move || run_episode(&cfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("episode thread panicked")).collect()
    })
}

/// [`run_suite`] over the whole built-in catalog.
pub fn run_catalog(base: &RunConfig) -> Vec<Result<EpisodeLog, HarnessError>> {
    let names: Vec<String> = catalog_names().into_iter().map(String::from).collect();
    run_suite(base, &names)
}
