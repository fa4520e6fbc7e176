//! `reflectlab` — run a named experiment scenario and write its report.

use clap::{Parser, Subcommand};
use reflectlab_cli::config::{resolve, scenario_schema, ParamValue, ScenarioConfig, SCENARIOS};
use reflectlab_cli::run_scenario;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "reflectlab",
    version,
    about = "Deterministic experiment runner for reflection-positivity models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write report.json + CSV artifacts.
    ///
    /// Give either a scenario name (with optional --param overrides) or
    /// --config pointing at a JSON run request.  Exit code 0 means every
    /// verdict passed, 1 means at least one failed, 2 means the run itself
    /// errored.
    Run {
        /// Scenario name (see `reflectlab list`).
        scenario: Option<String>,
        /// JSON run request (mutually exclusive with a scenario name).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override one declared parameter, e.g. --param s=0.5.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Seed for all randomness in the run.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for the report and artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the scenarios and their declared parameters.
    List,
}

fn main() -> ExitCode {
    match entry() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn entry() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for name in SCENARIOS {
                println!("{name}");
                for spec in scenario_schema(name).expect("listed scenario has a schema") {
                    println!("    {} = {}  ({})", spec.name, spec.default, spec.doc);
                }
            }
            Ok(true)
        }
        Command::Run {
            scenario,
            config,
            params,
            seed,
            out,
        } => {
            let mut request = match (&config, &scenario) {
                (Some(path), None) => ScenarioConfig::from_file(path)?,
                (None, Some(name)) => ScenarioConfig::new(name),
                _ => anyhow::bail!("pass exactly one of a scenario name or --config <file>"),
            };
            for raw in &params {
                let (key, value) = raw
                    .split_once('=')
                    .ok_or_else(|| anyhow::anyhow!("--param wants KEY=VALUE, got '{raw}'"))?;
                request.parameters.insert(key.to_string(), parse_value(value));
            }
            if let Some(seed) = seed {
                request.seed = seed;
            }
            if let Some(out) = out {
                request.output_path = out.display().to_string();
            }

            let resolved = resolve(&request)?;
            let report = run_scenario(&resolved)?;
            println!("scenario {} (seed {})", report.scenario, report.seed);
            for (name, value) in &report.metrics {
                println!("  metric  {name} = {value}");
            }
            for (name, pass) in &report.verdicts {
                println!("  verdict {name}: {}", if *pass { "pass" } else { "FAIL" });
            }
            println!(
                "report written to {}",
                resolved.output_path.join("report.json").display()
            );
            Ok(report.all_verdicts_pass())
        }
    }
}

/// CLI override values: booleans become flags, numbers become numbers,
/// everything else is text.
fn parse_value(raw: &str) -> ParamValue {
    match raw {
        "true" => ParamValue::Flag(true),
        "false" => ParamValue::Flag(false),
        _ => raw
            .parse::<f64>()
            .map(ParamValue::Number)
            .unwrap_or_else(|_| ParamValue::Text(raw.to_string())),
    }
}
