//! Scenario runner for discrete-time quantum walks on Fock-state lattices.
//!
//! A scenario is a TOML file with one or more `[[case]]` tables. Each case
//! names an algebra, an initial state and walk parameters; [`run::run_scenario`]
//! evolves it and [`output::write_outputs`] writes deterministic result files.
//! Named presets reproduce the standard figures.

pub mod config;
pub mod error;
pub mod noisy;
pub mod output;
pub mod plot;
pub mod presets;
pub mod run;
pub mod validate;

pub use config::{parse_config, CaseConfig, ScenarioConfig};
pub use error::RunError;
pub use output::write_outputs;
pub use presets::{preset, PRESETS};
pub use run::{run_scenario, CaseResult, RunResult};
pub use validate::{validate, validate_text, ValidationReport};
