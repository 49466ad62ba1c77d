//! Dry-run checks: sizes, truncation estimates, memory and runtime, without
//! building any operator.

use fslwalk_core::algebra::AlgebraParams;
use fslwalk_core::states::StateSpec;
use fslwalk_core::walk::hw_auto_n_max;
use serde::Serialize;

use crate::config::{parse_config, CaseConfig, ScenarioConfig};
use crate::run::estimate_memory_mb;

/// Seconds per site per Krylov vector update, measured on one core.
const SECONDS_PER_SITE_APPLICATION: f64 = 1.1e-8;
/// Krylov applications for a zero-norm exponential.
const BASE_APPLICATIONS: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub auto: bool,
    /// `n_max` or window in use.
    pub bound: usize,
    /// Excursion estimate for the configured walk.
    pub estimate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub algebra: Option<&'static str>,
    pub site_count: Option<usize>,
    pub coin_dim: Option<usize>,
    pub state_dim: Option<usize>,
    pub steps: Option<usize>,
    pub truncation: Option<TruncationReport>,
    pub memory_mb: Option<u64>,
    pub runtime_estimate_s: Option<f64>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub scenario: Option<String>,
    pub config_sha256: Option<String>,
    pub accepted: bool,
    pub errors: Vec<String>,
    pub cases: Vec<CaseReport>,
}

/// Validates scenario text; parse errors become report entries.
pub fn validate_text(text: &str) -> ValidationReport {
    match parse_config(text) {
        Ok(cfg) => validate(&cfg),
        Err(e) => ValidationReport { scenario: None, config_sha256: None, accepted: false, errors: vec![e.to_string()], cases: vec![] },
    }
}

pub fn validate(config: &ScenarioConfig) -> ValidationReport {
    let mut errors = Vec::new();
    if let Err(e) = config.check() {
        errors.push(e.to_string());
    }
    let cases: Vec<CaseReport> = config.cases.iter().map(|c| validate_case(config, c)).collect();
    let accepted = errors.is_empty() && cases.iter().all(|c| c.errors.is_empty());
    ValidationReport { scenario: Some(config.name.clone()), config_sha256: Some(config.hash()), accepted, errors, cases }
}

/// Largest generator norm times `|beta|`, the exponent each step resolves.
fn step_norm(params: &AlgebraParams, beta: f64) -> f64 {
    let scale = match *params {
        AlgebraParams::HeisenbergWeyl { n_max } => 2.0 * (n_max as f64).sqrt(),
        AlgebraParams::Su2 { two_s } => two_s as f64,
        AlgebraParams::Su3 { n } | AlgebraParams::So5 { n } => n as f64,
        AlgebraParams::Euclidean2 { .. } => 2.0,
        AlgebraParams::Su11 { n_max, .. } => n_max as f64,
    };
    scale * beta
}

fn validate_case(config: &ScenarioConfig, case: &CaseConfig) -> CaseReport {
    let mut report = CaseReport {
        name: case.name.clone(),
        algebra: None,
        site_count: None,
        coin_dim: None,
        state_dim: None,
        steps: None,
        truncation: None,
        memory_mb: None,
        runtime_estimate_s: None,
        warnings: vec![],
        errors: vec![],
    };
    let resolved = match case.resolve(config.seed) {
        Ok(r) => r,
        Err(e) => {
            report.errors.push(e.to_string());
            return report;
        }
    };
    let params = resolved.params;
    let kind = params.kind();
    let steps = resolved.walk.steps;
    report.algebra = Some(kind.name());
    report.steps = Some(steps);
    let sites = params.site_count();
    report.site_count = sites;
    report.coin_dim = Some(2 * kind.root_count());
    report.state_dim = sites.and_then(|s| s.checked_mul(2 * kind.root_count()));
    let beta = resolved.walk.beta.norm();
    let guard = resolved.options.guard_sites;
    let bound_and_estimate = match (params, &resolved.state) {
        (AlgebraParams::HeisenbergWeyl { n_max }, StateSpec::GlauberCoherent(a)) => {
            Some((n_max, hw_auto_n_max(a.norm(), steps, beta, case.truncation.safety, guard)))
        }
        (AlgebraParams::Euclidean2 { window }, StateSpec::E2Site(j)) => Some((
            window as usize,
            crate::config::e2_auto_window(j.unsigned_abs() as f64, steps, beta, guard) as usize,
        )),
        (AlgebraParams::Su11 { sector, n_max }, s) => {
            let xi = if let StateSpec::SqueezedVacuum(z) = s { z.norm() } else { 0.0 };
            Some((n_max, crate::config::su11_auto_n_max(xi, steps, beta, sector, guard)))
        }
        _ => None,
    };
    if let Some((bound, estimate)) = bound_and_estimate {
        if bound < estimate {
            report.warnings.push(format!("truncation {bound} is below the excursion estimate {estimate}; the run may abort on leakage"));
        }
        report.truncation = Some(TruncationReport { auto: resolved.auto_truncation, bound, estimate });
    }
    let snapshots = 1 + steps / resolved.record_every;
    let noisy = resolved.noise.filter(|n| n.epsilon > 0.0);
    let threads = rayon::current_num_threads();
    report.memory_mb = estimate_memory_mb(&params, snapshots, if noisy.is_some() { threads * 4 } else { 0 });
    match report.memory_mb {
        Some(mb) if mb <= config.memory_limit_mb() => {}
        Some(mb) => report.errors.push(format!("needs about {mb} MB, limit is {} MB", config.memory_limit_mb())),
        None => report.errors.push("lattice size overflows".into()),
    }
    if let Some(sites) = sites {
        let per_exp = BASE_APPLICATIONS + 2.0 * step_norm(&params, beta);
        let blocks = (2 * kind.root_count()) as f64;
        let realizations = noisy.map_or(1.0, |n| n.realizations as f64 / threads as f64);
        let seconds = steps as f64 * blocks * per_exp * sites as f64 * SECONDS_PER_SITE_APPLICATION * realizations;
        report.runtime_estimate_s = Some((seconds * 10.0).round() / 10.0);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    #[test]
    fn su2_preset_dimensions() {
        let report = validate(&preset("fig3").unwrap());
        assert!(report.accepted);
        let case = &report.cases[0];
        assert_eq!(case.site_count, Some(5001));
        assert_eq!(case.state_dim, Some(10002));
    }

    #[test]
    fn fig2b_reports_the_auto_truncation() {
        let report = validate(&preset("fig2b").unwrap());
        let t = report.cases[0].truncation.as_ref().unwrap();
        assert!(t.auto);
        assert_eq!(t.bound, t.estimate);
        // (sqrt2 * 40 + 1.5 * 30)^2 / 2 = 5158 plus tail room and guard band
        assert!(t.bound > 5158 && t.bound < 6000, "{}", t.bound);
    }

    #[test]
    fn parse_errors_are_reported_not_raised() {
        let report = validate_text("name = ");
        assert!(!report.accepted);
        assert_eq!(report.errors.len(), 1);
    }

    #[test]
    fn small_truncation_is_flagged() {
        let mut cfg = preset("fig2b").unwrap();
        cfg.cases[0].algebra = crate::config::AlgebraConfig::Hw { n_max: Some(2000) };
        let report = validate(&cfg);
        assert!(report.accepted);
        assert_eq!(report.cases[0].warnings.len(), 1);
    }
}
