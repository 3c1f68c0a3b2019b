//! Experiment orchestration for `landmark-core`: run configuration files,
//! resumable seeded sweeps, summaries, plot data and the verification
//! catalog behind the `landmark` command-line tool.

pub mod checks;
pub mod cli;
pub mod config;
pub mod experiments;
pub mod plot;
pub mod summary;
pub mod sweep;

pub use config::RunConfig;
pub use summary::{summarize, Summary};
pub use sweep::{run_sweep, SweepPlan, SweepRecord};

/// Environment variable holding the default worker count for sweeps.
pub const WORKERS_ENV: &str = "LANDMARK_WORKERS";

/// Worker count from [`WORKERS_ENV`], else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}
