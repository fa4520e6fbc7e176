//! Run configuration: scenario names, parameter schemas, and validation.
//!
//! Every scenario declares its full parameter schema — names, kinds,
//! defaults, one-line docs — and a configuration is resolved against that
//! schema before anything runs: unknown keys are rejected outright, kinds
//! are checked, and defaults are filled in so the emitted report always
//! carries the complete parameter set it actually ran with.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown scenario '{name}'; available: {available}")]
    UnknownScenario { name: String, available: String },
    #[error("scenario {scenario} accepts no parameter '{key}'; accepted: {accepted}")]
    UnknownKey {
        scenario: String,
        key: String,
        accepted: String,
    },
    #[error("scenario {scenario}: parameter '{key}' expects {expected}, got {got}")]
    BadValue {
        scenario: String,
        key: String,
        expected: &'static str,
        got: String,
    },
    #[error("reading config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing config file: {0}")]
    Json(#[from] serde_json::Error),
}

/// A parameter value: a number, a string, or a flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Flag(bool),
    Number(f64),
    Text(String),
}

impl ParamValue {
    fn kind(&self) -> &'static str {
        match self {
            ParamValue::Flag(_) => "a flag",
            ParamValue::Number(_) => "a number",
            ParamValue::Text(_) => "a string",
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Flag(v) => write!(f, "{v}"),
            ParamValue::Number(v) => write!(f, "{v}"),
            ParamValue::Text(v) => write!(f, "{v}"),
        }
    }
}

/// How a declared parameter is validated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Any finite real number.
    Real,
    /// A nonnegative integer (arrives as a JSON number).
    Count,
    /// Free text.
    Text,
    /// true/false.
    Flag,
}

/// One declared parameter of a scenario.
#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: ParamValue,
    pub doc: &'static str,
}

fn real(name: &'static str, default: f64, doc: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Real,
        default: ParamValue::Number(default),
        doc,
    }
}

fn count(name: &'static str, default: u64, doc: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Count,
        default: ParamValue::Number(default as f64),
        doc,
    }
}

fn text(name: &'static str, default: &str, doc: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Text,
        default: ParamValue::Text(default.to_string()),
        doc,
    }
}

/// The runnable scenario names.
pub const SCENARIOS: [&str; 13] = [
    "sl2-positivity",
    "sl2-contraction",
    "sl2-dual-spectrum",
    "sl2-identities",
    "kernels-bergman",
    "cayley-table",
    "phillips",
    "heisenberg-rp",
    "heisenberg-uncorrelate",
    "axb-qfield",
    "axb-escape",
    "axb-deficiency",
    "axb-nogo",
];

/// The declared parameters of a scenario, or None for an unknown name.
pub fn scenario_schema(name: &str) -> Option<Vec<ParamSpec>> {
    let schema = match name {
        "sl2-positivity" => vec![
            real("s", 0.5, "series parameter of the interval kernel"),
            count("bumps", 12, "number of bump functions in the test family"),
            real("reach", 0.8, "half-extent of the bump centers"),
            real("width", 0.15, "half-width of each bump"),
            count("quad_order", 80, "Gauss-Legendre order per panel"),
        ],
        "sl2-contraction" => vec![
            real("s", 0.5, "series parameter of the interval kernel"),
            count("draws", 20, "random semigroup elements to test"),
            count("quad_order", 60, "Gauss-Legendre order per panel"),
        ],
        "sl2-dual-spectrum" => vec![
            real("s", 0.5, "series parameter of the interval kernel"),
            text("y", "2X0", "cone generator: 2X0 or q11"),
            real("delta", 2e-7, "semigroup sampling step"),
            real("tol", 1e-4, "Richardson disagreement budget"),
            count("quad_order", 80, "Gauss-Legendre order per panel"),
        ],
        "sl2-identities" => vec![
            real("t_max", 2.0, "half-extent of the fixed-group grid"),
            count("t_count", 41, "points on the fixed-group grid"),
            count("pairs", 1000, "random (x, y) samples for the kernel identity"),
        ],
        "kernels-bergman" => vec![
            count("trials", 40, "random point configurations per sign of the exponent"),
            count("max_points", 8, "largest configuration size"),
            real("lambda_max", 3.0, "largest exponent magnitude sampled"),
        ],
        "cayley-table" => vec![count(
            "n_max",
            8,
            "largest family parameter tabulated for each series",
        )],
        "phillips" => vec![
            count("spaces", 50, "random finite reflection spaces to build"),
            count("max_points", 32, "largest space size"),
        ],
        "heisenberg-rp" => vec![
            count("funcs", 10, "random test functions on the upper half-plane"),
            count("quad_order", 40, "Gauss-Legendre order per direction"),
            count("table_len", 1024, "radial kernel table resolution"),
            real("table_tol", 1e-6, "radial kernel table verification tolerance"),
            text("cache_dir", "", "kernel table cache directory (default: <out>/cache)"),
        ],
        "heisenberg-uncorrelate" => vec![
            count("draws", 20, "random invariant subspaces to split"),
            count("points", 64, "model size (grid points per side)"),
            real("hbar", 0.8, "representation scale"),
            real("beta1", 0.45, "base annihilation frequency"),
        ],
        "axb-qfield" => vec![count(
            "samples",
            1000,
            "random slopes in the closed right half-plane",
        )],
        "axb-escape" => vec![real("x0", 0.0, "starting point of the classical particle")],
        "axb-deficiency" => vec![
            real("z_im", 1.0, "imaginary part of the spectral point (z = i·z_im)"),
            real("x_max", 20.0, "half-extent of the integration range"),
            real("decay_tol", 0.05, "amplitude log-slope classification threshold"),
        ],
        "axb-nogo" => vec![
            count("grid_points", 256, "position-grid size for the graph model"),
            real("b_max", 2.0, "largest semigroup parameter probed"),
        ],
        _ => return None,
    };
    Some(schema)
}

/// A run request as read from a config file or assembled from CLI flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_path")]
    pub output_path: String,
}

fn default_output_path() -> String {
    "reflectlab-out".to_string()
}

impl ScenarioConfig {
    pub fn new(scenario: &str) -> Self {
        ScenarioConfig {
            scenario: scenario.to_string(),
            parameters: BTreeMap::new(),
            seed: 0,
            output_path: default_output_path(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let bytes = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&bytes)?)
    }
}

/// A validated configuration: scenario known, every override matched to the
/// schema, every default filled in.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub scenario: String,
    pub parameters: BTreeMap<String, ParamValue>,
    pub seed: u64,
    pub output_path: PathBuf,
}

pub fn resolve(config: &ScenarioConfig) -> Result<ResolvedConfig, ConfigError> {
    let schema = scenario_schema(&config.scenario).ok_or_else(|| ConfigError::UnknownScenario {
        name: config.scenario.clone(),
        available: SCENARIOS.join(", "),
    })?;
    for (key, value) in &config.parameters {
        let spec = schema.iter().find(|s| s.name == key).ok_or_else(|| {
            ConfigError::UnknownKey {
                scenario: config.scenario.clone(),
                key: key.clone(),
                accepted: schema
                    .iter()
                    .map(|s| s.name)
                    .collect::<Vec<_>>()
                    .join(", "),
            }
        })?;
        let bad = |expected: &'static str| ConfigError::BadValue {
            scenario: config.scenario.clone(),
            key: key.clone(),
            expected,
            got: format!("{} ({})", value, value.kind()),
        };
        match (spec.kind, value) {
            (ParamKind::Real, ParamValue::Number(v)) => {
                if !v.is_finite() {
                    return Err(bad("a finite number"));
                }
            }
            (ParamKind::Count, ParamValue::Number(v)) => {
                if !(v.is_finite() && *v >= 0.0 && v.fract() == 0.0 && *v <= 1e12) {
                    return Err(bad("a nonnegative integer"));
                }
            }
            (ParamKind::Text, ParamValue::Text(_)) => {}
            (ParamKind::Flag, ParamValue::Flag(_)) => {}
            (ParamKind::Real, _) => return Err(bad("a finite number")),
            (ParamKind::Count, _) => return Err(bad("a nonnegative integer")),
            (ParamKind::Text, _) => return Err(bad("a string")),
            (ParamKind::Flag, _) => return Err(bad("a flag")),
        }
    }
    let parameters = schema
        .iter()
        .map(|spec| {
            let value = config
                .parameters
                .get(spec.name)
                .cloned()
                .unwrap_or_else(|| spec.default.clone());
            (spec.name.to_string(), value)
        })
        .collect();
    Ok(ResolvedConfig {
        scenario: config.scenario.clone(),
        parameters,
        seed: config.seed,
        output_path: PathBuf::from(&config.output_path),
    })
}

impl ResolvedConfig {
    /// A declared real parameter.  Panics on an undeclared key — that is a
    /// programming error, not a user error; resolution already validated
    /// every user-supplied value.
    pub fn real(&self, key: &str) -> f64 {
        match self.parameters.get(key) {
            Some(ParamValue::Number(v)) => *v,
            other => panic!("parameter '{key}' is not a declared number: {other:?}"),
        }
    }

    /// A declared count parameter.
    pub fn count(&self, key: &str) -> usize {
        let v = self.real(key);
        debug_assert!(v >= 0.0 && v.fract() == 0.0);
        v as usize
    }

    /// A declared text parameter.
    pub fn text(&self, key: &str) -> &str {
        match self.parameters.get(key) {
            Some(ParamValue::Text(v)) => v,
            other => panic!("parameter '{key}' is not declared text: {other:?}"),
        }
    }
}
