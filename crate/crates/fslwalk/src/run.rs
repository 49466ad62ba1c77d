//! Scenario execution.

use fslwalk_core::algebra::{AlgebraParams, AlgebraRep};
use fslwalk_core::observables::{
    asymmetry, coin_entropy, excess_width, log_linear_fit, power_law_fit, spread, support_radius, Distribution,
    LinearFit,
};
use fslwalk_core::states::make_state;
use fslwalk_core::walk::{evolve_observe, site_marginal, Walker, WalkerState};
use fslwalk_core::AlgebraKind;
use serde::Serialize;

use crate::config::{CaseConfig, ResolvedCase, ScenarioConfig};
use crate::error::RunError;
use crate::noisy::evolve_noisy_parallel;

pub const TOOL: &str = "fslwalk";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Probability threshold of the reported support radius.
pub const SUPPORT_THRESHOLD: f64 = 1e-4;
/// Krylov vectors assumed by the memory estimate.
const KRYLOV_VECTORS: u64 = 32;

/// Observables of one recorded step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotSummary {
    pub step: usize,
    pub mean: Vec<f64>,
    pub sigma: f64,
    /// `sqrt(sigma^2 - sigma_0^2)`.
    pub excess_width: f64,
    pub support_radius: f64,
    /// Signed mass right minus left of the initial mean, 1D lattices only.
    pub asymmetry: Option<f64>,
    /// Coin-walker entanglement in bits; absent for ensemble averages.
    pub coin_entropy: Option<f64>,
    /// Guard band probability; absent for ensemble averages.
    pub leakage: Option<f64>,
    pub total_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    /// `excess_width_power_law` (slope is the exponent) or
    /// `log_variance_linear` (slope of `ln sigma^2` per step).
    pub measure: &'static str,
    pub first_step: usize,
    pub last_step: usize,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub name: String,
    pub rep: AlgebraRep,
    pub auto_truncation: bool,
    pub steps: usize,
    pub record_every: usize,
    pub epsilon: Option<f64>,
    pub realizations: Option<usize>,
    pub snapshots: Vec<SnapshotSummary>,
    /// Site probabilities at each recorded step.
    pub distributions: Vec<(usize, Vec<f64>)>,
    pub fit: Option<FitSummary>,
    /// Largest guard band probability seen.
    pub max_leakage: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: ScenarioConfig,
    pub config_hash: String,
    pub cases: Vec<CaseResult>,
}

impl RunResult {
    pub fn case(&self, name: &str) -> Option<&CaseResult> {
        self.cases.iter().find(|c| c.name == name)
    }
}

/// Rough peak memory of one case in MB.
pub fn estimate_memory_mb(params: &AlgebraParams, snapshots: usize, parallel_traces: usize) -> Option<u64> {
    let sites = params.site_count()? as u64;
    let kind = params.kind();
    let roots = kind.root_count() as u64;
    let coin = 2 * roots;
    let label_len: u64 = match kind {
        AlgebraKind::Su3 => 3,
        AlgebraKind::So5 => 4,
        _ => 1,
    };
    let per_site = coin * 16 * 3
        + KRYLOV_VECTORS * 16
        + roots * 3 * 32
        + label_len * 8
        + 24
        + 8 * (snapshots as u64) * (1 + parallel_traces as u64);
    Some((sites.checked_mul(per_site)? >> 20) + 1)
}

/// Runs every case of `config`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunResult, RunError> {
    config.check()?;
    let mut cases = Vec::with_capacity(config.cases.len());
    for case in &config.cases {
        cases.push(run_case(config, case)?);
    }
    Ok(RunResult { config: config.clone(), config_hash: config.hash(), cases })
}

fn run_case(config: &ScenarioConfig, case: &CaseConfig) -> Result<CaseResult, RunError> {
    let name = case.name.as_str();
    let resolved = case.resolve(config.seed)?;
    let ResolvedCase { params, auto_truncation, state, walk, record_every, options, noise } = resolved;
    let snapshots = 1 + walk.steps / record_every;
    let traces = if noise.is_some_and(|n| n.epsilon > 0.0) { rayon::current_num_threads() * 4 } else { 0 };
    let limit = config.memory_limit_mb();
    match estimate_memory_mb(&params, snapshots, traces) {
        Some(mb) if mb <= limit => {}
        est => return Err(RunError::Memory { case: name.to_string(), required_mb: est.unwrap_or(u64::MAX), limit_mb: limit }),
    }
    let rep = AlgebraRep::build(params.kind(), params).map_err(|source| RunError::Algebra { case: name.to_string(), source })?;
    let amplitudes = make_state(&rep, &state).map_err(|source| RunError::State { case: name.to_string(), source })?;
    let init = WalkerState::with_coin(amplitudes.as_slice(), &walk.coin_init, rep.coin_dim()).map_err(|e| RunError::walk(name, e))?;

    // (step, probabilities, coin entropy, leakage)
    let mut records: Vec<(usize, Vec<f64>, Option<f64>, Option<f64>)> = Vec::with_capacity(snapshots);
    let max_leakage;
    match &noise {
        Some(spec) => {
            let walker = Walker::new(&rep, &walk, options).map_err(|e| RunError::walk(name, e))?;
            let out = evolve_noisy_parallel(&walker, &init, walk.steps, spec, record_every).map_err(|e| RunError::walk(name, e))?;
            max_leakage = out.leakage;
            for (step, avg) in out.steps.into_iter().zip(out.averages) {
                records.push((step, avg, None, None));
            }
        }
        None => {
            let last = evolve_observe(&init, &rep, &walk, &options, record_every, |step, s| {
                records.push((step, site_marginal(s), coin_entropy(s).ok(), Some(s.leakage())));
                Ok(())
            })
            .map_err(|e| RunError::walk(name, e))?;
            max_leakage = last.leakage();
        }
    }

    let observable = |source| RunError::Observable { case: name.to_string(), source };
    let mut summaries = Vec::with_capacity(records.len());
    let mut sigma0 = 0.0;
    let mut center0 = 0.0;
    for (i, (step, probs, entropy, leakage)) in records.iter().enumerate() {
        let dist = Distribution::from_probabilities(&rep, probs.clone(), leakage.unwrap_or(max_leakage)).map_err(observable)?;
        let report = spread(&dist, *step).map_err(observable)?;
        if i == 0 {
            sigma0 = report.sigma;
            center0 = report.mean[0];
        }
        let asym = if rep.rank() == 1 { Some(asymmetry(&dist, center0).map_err(observable)?) } else { None };
        summaries.push(SnapshotSummary {
            step: *step,
            excess_width: excess_width(report.sigma, sigma0),
            sigma: report.sigma,
            mean: report.mean,
            support_radius: support_radius(&dist, SUPPORT_THRESHOLD).map_err(observable)?,
            asymmetry: asym,
            coin_entropy: *entropy,
            leakage: *leakage,
            total_probability: dist.total(),
        });
    }
    let last_step = case.fit.max_step.unwrap_or(walk.steps).min(walk.steps);
    let fit = spreading_fit(&rep, &summaries, case.fit.min_step, last_step);
    Ok(CaseResult {
        name: name.to_string(),
        auto_truncation,
        steps: walk.steps,
        record_every,
        epsilon: noise.map(|n| n.epsilon),
        realizations: noise.map(|n| n.realizations),
        snapshots: summaries,
        distributions: records.into_iter().map(|(s, p, _, _)| (s, p)).collect(),
        fit,
        max_leakage,
        rep,
    })
}

/// Power law of the excess width against the step, or for su(1,1) the
/// exponential growth rate of the variance, over `[first, last]`.
pub fn spreading_fit(rep: &AlgebraRep, snaps: &[SnapshotSummary], first: usize, last: usize) -> Option<FitSummary> {
    let window: Vec<&SnapshotSummary> = snaps.iter().filter(|s| s.step >= first.max(1) && s.step <= last).collect();
    let xs: Vec<f64> = window.iter().map(|s| s.step as f64).collect();
    let (measure, fit): (&'static str, Option<LinearFit>) = if rep.kind() == AlgebraKind::Su11 {
        let ys: Vec<f64> = window.iter().map(|s| s.sigma * s.sigma).collect();
        ("log_variance_linear", log_linear_fit(&xs, &ys).ok())
    } else {
        let ys: Vec<f64> = window.iter().map(|s| s.excess_width).collect();
        ("excess_width_power_law", power_law_fit(&xs, &ys).ok())
    };
    let fit = fit?;
    Some(FitSummary {
        measure,
        first_step: window.first()?.step,
        last_step: window.last()?.step,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        points: fit.points,
    })
}
