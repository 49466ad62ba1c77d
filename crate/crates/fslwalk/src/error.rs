use std::path::PathBuf;

use fslwalk_core::algebra::AlgebraError;
use fslwalk_core::observables::ObservableError;
use fslwalk_core::states::StateError;
use fslwalk_core::walk::WalkError;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error{}: {message}", position(*line, *column))]
    Config { message: String, line: Option<usize>, column: Option<usize> },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("unknown scenario {0:?}; try list-scenarios")]
    UnknownScenario(String),
    #[error("case {case}: probability {mass:e} reached the truncation guard band at step {step}")]
    Leakage { case: String, step: usize, mass: f64 },
    #[error("case {case}: needs about {required_mb} MB, limit is {limit_mb} MB")]
    Memory { case: String, required_mb: u64, limit_mb: u64 },
    #[error("case {case}: {source}")]
    Algebra { case: String, source: AlgebraError },
    #[error("case {case}: {source}")]
    State { case: String, source: StateError },
    #[error("case {case}: {source}")]
    Walk { case: String, source: WalkError },
    #[error("case {case}: {source}")]
    Observable { case: String, source: ObservableError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

fn position(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

impl RunError {
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config { .. } => "config",
            RunError::Invalid(_) => "invalid",
            RunError::UnknownScenario(_) => "unknown_scenario",
            RunError::Leakage { .. } => "leakage",
            RunError::Memory { .. } => "memory_limit",
            RunError::Algebra { .. } => "algebra",
            RunError::State { .. } => "state",
            RunError::Walk { .. } => "walk",
            RunError::Observable { .. } => "observable",
            RunError::Io { .. } => "io",
        }
    }

    /// Process exit code: 2 for bad input, 3 for failed runs, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config { .. } | RunError::Invalid(_) | RunError::UnknownScenario(_) => 2,
            RunError::Io { .. } => 4,
            _ => 3,
        }
    }

    /// One-line JSON error document.
    pub fn to_json(&self) -> serde_json::Value {
        let mut detail = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            RunError::Config { line, column, .. } => {
                detail["line"] = json!(line);
                detail["column"] = json!(column);
            }
            RunError::Leakage { case, step, mass } => {
                detail["case"] = json!(case);
                detail["step"] = json!(step);
                detail["mass"] = json!(mass);
            }
            RunError::Memory { case, required_mb, limit_mb } => {
                detail["case"] = json!(case);
                detail["required_mb"] = json!(required_mb);
                detail["limit_mb"] = json!(limit_mb);
            }
            _ => {}
        }
        json!({ "error": detail })
    }

    /// Wraps a walk error, lifting leakage into its own variant.
    pub fn walk(case: &str, e: WalkError) -> Self {
        match e {
            WalkError::Leakage { step, mass } => RunError::Leakage { case: case.to_string(), step, mass },
            source => RunError::Walk { case: case.to_string(), source },
        }
    }
}
