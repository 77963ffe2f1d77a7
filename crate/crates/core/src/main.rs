use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use parajc::config::{ScenarioConfig, ScenarioId};
use parajc::{scenarios, Error, Result};

/// Datasets for a qubit in a parametrically driven cavity.
///
/// Scenarios: spectrum, beats, quietstate, wigner, fidelity-scan,
/// ramp-compare. Exit codes: 0 ok, 1 i/o, 2 config error, 3 numerical gate.
#[derive(Debug, Parser)]
#[command(name = "parajc", version)]
struct Cli {
    /// Scenario to run.
    #[arg(required_unless_present = "print_defaults")]
    scenario: Option<String>,

    /// TOML config; omitted sections take the scenario defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (overrides `output_dir` from the config).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Print the complete default config of a scenario and exit.
    #[arg(long, value_name = "SCENARIO", conflicts_with_all = ["scenario", "config", "out"])]
    print_defaults: Option<String>,
}

fn execute(cli: Cli) -> Result<()> {
    if let Some(name) = cli.print_defaults {
        let id: ScenarioId = name.parse()?;
        print!("{}", ScenarioConfig::defaults(id).to_toml()?);
        return Ok(());
    }
    let id: ScenarioId = cli
        .scenario
        .as_deref()
        .ok_or_else(|| Error::Config("no scenario given".into()))?
        .parse()?;
    let cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    }
    .for_scenario(id)?;
    let out_dir = cli
        .out
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(id.as_str()));
    let manifest = scenarios::run(&cfg, &out_dir)?;
    eprintln!(
        "{}: wrote {} files to {} in {:.2}s",
        id,
        manifest.outputs.len() + 1,
        out_dir.display(),
        manifest.duration_seconds
    );
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("parajc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
