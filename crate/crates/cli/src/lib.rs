//! Seeded experiment harness: one JSON config in, one deterministic report
//! out (a JSON header line followed by CSV rows).

pub mod config;
pub mod diff;
pub mod experiments;
pub mod report;

use serde_json::json;

pub use config::ExperimentConfig;
pub use diff::{diff_transcripts, DiffVerdict};
pub use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Lab(#[from] qmalab::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Budget(_) | CliError::Lab(qmalab::Error::BudgetExceeded(_) | qmalab::Error::CutoffExceeded { .. }) => "budget",
            CliError::Lab(_) => "experiment",
            CliError::Io(_) => "io",
        }
    }

    /// Single-line JSON error block.
    pub fn block(&self) -> String {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }
}

/// Validates and runs `config` on a pool of `threads` workers (all cores
/// when `None`); the report does not depend on the thread count.
pub fn run_config(config: &ExperimentConfig, threads: Option<usize>) -> Result<(Report, String), CliError> {
    config.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    let report = pool.install(|| experiments::run(config))?;
    let text = report.render(config);
    Ok((report, text))
}
