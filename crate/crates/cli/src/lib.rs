//! Deterministic experiment runner over the core library: thirteen named
//! scenarios, schema-validated configuration, and byte-reproducible
//! reports.
//!
//! The binary front end lives in `main.rs`; everything testable is here.
//! A run takes a [`config::ResolvedConfig`], executes the named scenario,
//! writes `report.json` and `summary.csv` (plus scenario-specific CSVs)
//! under the output directory, and returns the [`report::Report`].

pub mod config;
pub mod report;
pub mod scenarios;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Scenario(#[from] scenarios::ScenarioError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Run one scenario under the thread budget in `REFLECTLAB_THREADS` (unset,
/// empty, or unparsable = the global default pool).  Reports come out
/// byte-identical across thread counts and reruns: all randomness flows
/// from the seed, and every reduction runs in a fixed order.
pub fn run_scenario(config: &config::ResolvedConfig) -> Result<report::Report, CliError> {
    match thread_budget() {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| std::io::Error::other(e.to_string()))?;
            pool.install(|| scenarios::run(config))
        }
        None => scenarios::run(config),
    }
}

fn thread_budget() -> Option<usize> {
    let raw = std::env::var("REFLECTLAB_THREADS").ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => None,
    }
}
