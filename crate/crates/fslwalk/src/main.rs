use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fslwalk::{preset, run_scenario, validate, write_outputs, RunError, ScenarioConfig, PRESETS};
use serde_json::json;

#[derive(Parser)]
#[command(name = "fslwalk", version, about = "Quantum walks on Fock-state lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset; see list-scenarios.
    #[arg(long)]
    scenario: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write result files.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory; defaults to the config's `output` or out/<name>.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write SVG plots.
        #[arg(long)]
        plot: bool,
        /// Overrides the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the memory limit.
        #[arg(long)]
        memory_limit_mb: Option<u64>,
    },
    /// Dry-run checks without simulation.
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// Print the built-in presets.
    ListScenarios,
}

fn load(source: &Source) -> Result<ScenarioConfig, RunError> {
    match (&source.config, &source.scenario) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| RunError::Io { path: path.clone(), source: e })?;
            fslwalk::parse_config(&text)
        }
        (None, Some(name)) => preset(name).ok_or_else(|| RunError::UnknownScenario(name.clone())),
        (None, None) => unreachable!("clap requires a source"),
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json serializes"));
}

fn run(
    source: &Source,
    out: Option<PathBuf>,
    plot: bool,
    seed: Option<u64>,
    memory_limit_mb: Option<u64>,
) -> Result<serde_json::Value, RunError> {
    let mut config = load(source)?;
    if seed.is_some() {
        config.seed = seed;
    }
    if memory_limit_mb.is_some() {
        config.memory_limit_mb = memory_limit_mb;
    }
    let dir = out.or_else(|| config.output.clone()).unwrap_or_else(|| Path::new("out").join(&config.name));
    let started = Instant::now();
    let result = run_scenario(&config)?;
    let files = write_outputs(&result, &dir, plot)?;
    eprintln!("{}: {} case(s) in {:.1} s", config.name, result.cases.len(), started.elapsed().as_secs_f64());
    Ok(json!({
        "status": "ok",
        "scenario": config.name,
        "config_sha256": result.config_hash,
        "output": dir,
        "files": files,
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { source, out, plot, seed, memory_limit_mb } => run(&source, out, plot, seed, memory_limit_mb),
        Command::Validate { source } => load(&source).map(|cfg| {
            let report = validate(&cfg);
            serde_json::to_value(&report).expect("report serializes")
        }),
        Command::ListScenarios => {
            let list: Vec<_> = PRESETS.iter().map(|(name, about)| json!({ "name": name, "description": about })).collect();
            Ok(json!({ "scenarios": list }))
        }
    };
    match outcome {
        Ok(v) => {
            print_json(&v);
            ExitCode::SUCCESS
        }
        Err(e) => {
            print_json(&e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
