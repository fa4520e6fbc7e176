//! The thirteen executable experiment pipelines.
//!
//! Each scenario maps a resolved configuration to a set of named metrics,
//! named pass/fail verdicts, and CSV artifacts.  Everything downstream of
//! the seed is deterministic, and reductions run in fixed order, so a rerun
//! with the same configuration reproduces the report byte for byte
//! regardless of worker-thread count.

mod axb_runs;
mod heisenberg_runs;
mod kernel_runs;
mod quotient_runs;
mod sl2_runs;

use crate::config::ResolvedConfig;
use crate::report::{emit, EmitFormat, Report};
use crate::CliError;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;
use thiserror::Error;

/// A scenario failure: the wrapped module error plus which scenario hit it.
#[derive(Debug, Error)]
#[error("scenario {scenario}: {message}")]
pub struct ScenarioError {
    pub scenario: String,
    pub message: String,
}

impl ScenarioError {
    pub(crate) fn new(scenario: &str, err: impl std::fmt::Display) -> Self {
        ScenarioError {
            scenario: scenario.to_string(),
            message: err.to_string(),
        }
    }
}

/// Maps any displayable error into a `ScenarioError` tagged with the
/// scenario name — the standard `map_err` argument inside pipelines.
pub(crate) fn werr<E: std::fmt::Display>(scenario: &str) -> impl Fn(E) -> ScenarioError + '_ {
    move |err| ScenarioError::new(scenario, err)
}

/// What a scenario produces before it is wrapped into a `Report`.
#[derive(Debug, Default)]
pub(crate) struct Outcome {
    pub metrics: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, bool>,
    pub artifacts: Vec<String>,
}

impl Outcome {
    pub fn new() -> Self {
        Outcome::default()
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        assert!(value.is_finite(), "metric {name} is not finite: {value}");
        self.metrics.insert(name.to_string(), value);
    }

    pub fn verdict(&mut self, name: &str, pass: bool) {
        self.verdicts.insert(name.to_string(), pass);
    }

    pub fn artifact(&mut self, name: &str) {
        self.artifacts.push(name.to_string());
    }
}

/// The deterministic random source used by every sampling scenario.
pub(crate) fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Write one CSV artifact into the output directory.
pub(crate) fn write_csv<R>(
    out: &Path,
    name: &str,
    header: &[&str],
    rows: R,
) -> std::io::Result<()>
where
    R: IntoIterator<Item = Vec<String>>,
{
    let mut writer = csv::Writer::from_path(out.join(name))?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush()
}

/// Execute the scenario a resolved configuration names, write the report
/// and its artifacts under the output path, and hand the report back.
pub fn run(config: &ResolvedConfig) -> Result<Report, CliError> {
    std::fs::create_dir_all(&config.output_path)?;
    let started = Instant::now();
    let out = config.output_path.as_path();
    let mut outcome = match config.scenario.as_str() {
        "sl2-positivity" => sl2_runs::positivity(config, out)?,
        "sl2-contraction" => sl2_runs::contraction(config, out)?,
        "sl2-dual-spectrum" => sl2_runs::dual_spectrum(config, out)?,
        "sl2-identities" => sl2_runs::identities(config, out)?,
        "kernels-bergman" => kernel_runs::bergman(config, out)?,
        "cayley-table" => kernel_runs::cayley(config, out)?,
        "phillips" => quotient_runs::phillips(config, out)?,
        "heisenberg-rp" => heisenberg_runs::rp(config, out)?,
        "heisenberg-uncorrelate" => heisenberg_runs::uncorrelate_models(config, out)?,
        "axb-qfield" => axb_runs::qfield(config, out)?,
        "axb-escape" => axb_runs::escape(config, out)?,
        "axb-deficiency" => axb_runs::deficiency(config, out)?,
        "axb-nogo" => axb_runs::nogo(config, out)?,
        other => unreachable!("resolution admitted unknown scenario {other}"),
    };
    outcome.artifact("summary.csv");
    let report = Report {
        scenario: config.scenario.clone(),
        parameters: config.parameters.clone(),
        seed: config.seed,
        metrics: outcome.metrics,
        verdicts: outcome.verdicts,
        artifacts: outcome.artifacts,
        runtime_ms: 0,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    emit(&report, EmitFormat::Json, &out.join("report.json"))?;
    emit(&report, EmitFormat::CsvSummary, &out.join("summary.csv"))?;
    eprintln!(
        "{}: finished in {} ms",
        config.scenario,
        started.elapsed().as_millis()
    );
    Ok(report)
}
