//! Deterministic run reports.
//!
//! A report is the single source of truth about a run: scenario, the full
//! parameter set (defaults included), named metrics, named pass/fail
//! verdicts, and the list of emitted data files.  Two runs with the same
//! configuration and tool version must serialize to identical bytes, so
//! every map is ordered and the wall-clock time is deliberately kept out of
//! the serialized payload (`runtime_ms` is fixed at 0; the measured time is
//! printed to stderr instead).

use crate::config::ParamValue;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub parameters: BTreeMap<String, ParamValue>,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, bool>,
    /// File names (relative to the output directory) of the emitted CSVs.
    pub artifacts: Vec<String>,
    /// Always 0 in emitted reports: wall time varies between runs and would
    /// break the bit-identical reproducibility contract.
    pub runtime_ms: u64,
    pub tool_version: String,
}

impl Report {
    pub fn all_verdicts_pass(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Json,
    /// One `metric,value` row per metric.
    CsvSummary,
}

/// Serialize the report to a file.  Both formats are deterministic: JSON
/// field order follows the struct, maps are sorted, and floats print in
/// shortest round-trip form.
pub fn emit(report: &Report, format: EmitFormat, path: &Path) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    match format {
        EmitFormat::Json => {
            let body = serde_json::to_string_pretty(report).expect("report serialization");
            writeln!(file, "{body}")?;
        }
        EmitFormat::CsvSummary => {
            writeln!(file, "metric,value")?;
            for (name, value) in &report.metrics {
                writeln!(file, "{name},{value}")?;
            }
        }
    }
    Ok(())
}

pub fn read_report(path: &Path) -> std::io::Result<Report> {
    let body = std::fs::read_to_string(path)?;
    serde_json::from_str(&body).map_err(std::io::Error::other)
}
