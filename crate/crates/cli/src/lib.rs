//! Command-line front end: scenario runs and an interactive loop.

pub mod repl;

use std::path::{Path, PathBuf};

use thiserror::Error;
use vgimp_core::belief::BeliefStore;
use vgimp_core::error::ScenarioError;
use vgimp_core::scenario::{load_scenario, Scenario};

/// Exit status when a strict run halts on an unexplained utterance.
pub const EXIT_HALTED: i32 = 1;
/// Exit status for unreadable or invalid input.
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Scenario { path: PathBuf, source: ScenarioError },
}

pub fn read_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    load_scenario(&text).map_err(|source| CliError::Scenario { path: path.into(), source })
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

/// One line per attitude, grouped by viewpoint.
pub fn format_store(store: &BeliefStore) -> String {
    let mut out = String::new();
    for (path, attitudes) in store.spaces() {
        for a in attitudes {
            out.push_str(&format!("[{}] {a}\n", path.agents().join(", ")));
        }
    }
    for e in store.expectations() {
        out.push_str(&format!("expects({}, {}, {})\n", e.asker, e.asked, e.content));
    }
    out
}
