//! Scenario runner for normality experiments along subsequences.
//!
//! A scenario takes an [`ExperimentConfig`], samples sequences for each seed,
//! restricts them along a set, measures frequencies and defects, compares
//! them with exact or truncated predictions and returns an
//! [`ExperimentReport`] with pass/fail criteria.

pub mod config;
pub mod report;
pub mod scenarios;

pub use config::{ConfigError, ExperimentConfig};
pub use report::{emit_report, ExperimentReport, Format, ReportError};
pub use scenarios::{list_scenarios, run_scenario, ScenarioInfo};

use normlab_core::empirics::EmpiricsError;
use normlab_core::measures::MeasureError;
use normlab_core::selectors::SelectorError;
use normlab_core::sources::SourceError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Selector(#[from] SelectorError),
    #[error(transparent)]
    Empirics(#[from] EmpiricsError),
    #[error("scenario `{scenario}` cannot run: {reason}")]
    Unsupported { scenario: String, reason: String },
}

/// Worker count from `NORMLAB_WORKERS`, if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var("NORMLAB_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
}
