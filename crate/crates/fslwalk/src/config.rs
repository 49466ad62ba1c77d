//! Scenario files.
//!
//! A scenario is a TOML document with a few top-level keys and one or more
//! `[[case]]` tables. Every case names an algebra, an initial state and a
//! walk; noise and fit windows are optional.
//!
//! ```toml
//! name = "demo"
//! seed = 7
//!
//! [[case]]
//! name = "hw"
//! algebra = { kind = "hw" }
//! state = { kind = "glauber", alpha = 40.0 }
//! walk = { beta = 1.0, steps = 30, coin = "hadamard", coin_init = "symmetric_plus_i" }
//! ```

use std::path::PathBuf;

use fslwalk_core::algebra::{AlgebraParams, Su11Sector};
use fslwalk_core::states::{CoinInit, StateSpec};
use fslwalk_core::walk::{hw_auto_n_max, CoinSpec, NoisePlacement, NoiseSpec, WalkConfig, WalkOptions};
use fslwalk_core::numerics::DenseMatrix;
use fslwalk_core::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::RunError;

/// Default memory ceiling for one case.
pub const DEFAULT_MEMORY_LIMIT_MB: u64 = 2048;
/// Distribution rows below this probability are left out of the CSV.
pub const DEFAULT_PROBABILITY_FLOOR: f64 = 1e-15;
/// Safety factor `c` in the Heisenberg-Weyl excursion estimate.
pub const DEFAULT_HW_SAFETY: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Master seed for noisy cases.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output directory; not part of the config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_limit_mb: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability_floor: Option<f64>,
    #[serde(rename = "case")]
    pub cases: Vec<CaseConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub name: String,
    pub algebra: AlgebraConfig,
    pub state: StateConfig,
    pub walk: WalkSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub truncation: TruncationConfig,
}

/// A complex number written as `1.5` or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Complex {
    Real(f64),
    Pair([f64; 2]),
}

impl Complex {
    pub fn value(self) -> C64 {
        match self {
            Complex::Real(x) => C64::new(x, 0.0),
            Complex::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Even,
    Odd,
}

impl From<Sector> for Su11Sector {
    fn from(s: Sector) -> Self {
        match s {
            Sector::Even => Su11Sector::Even,
            Sector::Odd => Su11Sector::Odd,
        }
    }
}

/// Algebra and size. Truncated algebras size themselves when the bound is
/// left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraConfig {
    Hw {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_max: Option<usize>,
    },
    Su2 {
        two_s: u32,
    },
    Su3 {
        n: u32,
    },
    So5 {
        n: u32,
    },
    E2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<u32>,
    },
    Su11 {
        sector: Sector,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_max: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    Fock { label: Vec<i64> },
    Glauber { alpha: Complex },
    SpinCoherent { theta: f64, phi: f64 },
    Su3Coherent { b: [Complex; 3] },
    Gaussian { center: Vec<f64>, sigma: f64 },
    SqueezedVacuum { xi: Complex },
    E2Site { j: i64 },
}

impl StateConfig {
    pub fn spec(&self) -> StateSpec {
        match self {
            StateConfig::Fock { label } => StateSpec::Fock(label.clone()),
            StateConfig::Glauber { alpha } => StateSpec::GlauberCoherent(alpha.value()),
            StateConfig::SpinCoherent { theta, phi } => StateSpec::SpinCoherent { theta: *theta, phi: *phi },
            StateConfig::Su3Coherent { b } => StateSpec::Su3Coherent([b[0].value(), b[1].value(), b[2].value()]),
            StateConfig::Gaussian { center, sigma } => StateSpec::GaussianFsl { center: center.clone(), sigma: *sigma },
            StateConfig::SqueezedVacuum { xi } => StateSpec::SqueezedVacuum(xi.value()),
            StateConfig::E2Site { j } => StateSpec::E2Site(*j),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoinConfig {
    /// `"hadamard"` or `"grover"`.
    Named(String),
    /// Row-major unitary.
    Custom { custom: Vec<Vec<Complex>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoinInitConfig {
    /// `"symmetric_plus_i"`, `"grover_symmetric"`, `"up"` or `"down"`.
    Named(String),
    Basis { basis: usize },
    Custom { custom: Vec<Complex> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkSection {
    pub beta: Complex,
    /// Separate amplitude per root, overriding `beta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_betas: Option<Vec<Complex>>,
    /// Step count; alternatively `total_time` sets `m = round(T / |beta|)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
    #[serde(default = "one")]
    pub record_every: usize,
    pub coin: CoinConfig,
    pub coin_init: CoinInitConfig,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    BeforeCoin,
    #[default]
    AfterCoin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub epsilon: f64,
    pub realizations: usize,
    #[serde(default)]
    pub placement: Placement,
}

/// Step window for the spreading fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default = "default_fit_min")]
    pub min_step: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step: Option<usize>,
}

fn default_fit_min() -> usize {
    5
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { min_step: default_fit_min(), max_step: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    #[serde(default = "default_safety")]
    pub safety: f64,
    #[serde(default = "default_guard")]
    pub guard_sites: usize,
    #[serde(default = "default_leakage")]
    pub leakage_threshold: f64,
}

fn default_safety() -> f64 {
    DEFAULT_HW_SAFETY
}

fn default_guard() -> usize {
    fslwalk_core::walk::DEFAULT_GUARD_SITES
}

fn default_leakage() -> f64 {
    fslwalk_core::walk::DEFAULT_LEAKAGE_THRESHOLD
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig { safety: default_safety(), guard_sites: default_guard(), leakage_threshold: default_leakage() }
    }
}

/// Parses a scenario, reporting the line, column and key of the first error.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, RunError> {
    toml::from_str::<ScenarioConfig>(text).map_err(|e| {
        let (line, column) = match e.span() {
            Some(span) => {
                let (l, c) = line_col(text, span.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        RunError::Config { message: e.message().to_string(), line, column }
    })
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl ScenarioConfig {
    /// Hex SHA-256 of the canonical JSON form, output directory excluded.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = None;
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn memory_limit_mb(&self) -> u64 {
        self.memory_limit_mb.unwrap_or(DEFAULT_MEMORY_LIMIT_MB)
    }

    pub fn probability_floor(&self) -> f64 {
        self.probability_floor.unwrap_or(DEFAULT_PROBABILITY_FLOOR)
    }

    /// Checks that need no simulation: names, seeds, and every case.
    pub fn check(&self) -> Result<(), RunError> {
        if self.cases.is_empty() {
            return Err(RunError::Invalid("a scenario needs at least one [[case]]".into()));
        }
        let mut names: Vec<&str> = self.cases.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(RunError::Invalid("case names must be unique".into()));
        }
        for case in &self.cases {
            if case.name.is_empty() || !case.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
                return Err(RunError::Invalid(format!("case name {:?} must be non-empty [A-Za-z0-9._-]", case.name)));
            }
            case.resolve(self.seed)?;
        }
        if let Some(floor) = self.probability_floor {
            if !(0.0..1.0).contains(&floor) {
                return Err(RunError::Invalid("probability_floor must lie in [0, 1)".into()));
            }
        }
        Ok(())
    }
}

/// A case translated into core types.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedCase {
    pub params: AlgebraParams,
    /// Whether the truncation was sized automatically.
    pub auto_truncation: bool,
    pub state: StateSpec,
    pub walk: WalkConfig,
    pub record_every: usize,
    pub options: WalkOptions,
    pub noise: Option<NoiseSpec>,
}

impl CaseConfig {
    pub fn steps(&self) -> Result<usize, RunError> {
        let beta = self.walk.beta.value().norm();
        match (self.walk.steps, self.walk.total_time) {
            (Some(m), None) => Ok(m),
            (None, Some(t)) => {
                if !(t.is_finite() && t >= 0.0) || beta == 0.0 {
                    return Err(self.invalid("total_time needs a finite T >= 0 and a nonzero beta"));
                }
                Ok((t / beta).round() as usize)
            }
            _ => Err(self.invalid("give exactly one of walk.steps and walk.total_time")),
        }
    }

    fn invalid(&self, msg: &str) -> RunError {
        RunError::Invalid(format!("case {}: {msg}", self.name))
    }

    pub fn coin(&self) -> Result<CoinSpec, RunError> {
        match &self.walk.coin {
            CoinConfig::Named(n) => match n.as_str() {
                "hadamard" => Ok(CoinSpec::Hadamard),
                "grover" => Ok(CoinSpec::Grover),
                other => Err(self.invalid(&format!("unknown coin {other:?} (hadamard, grover or {{ custom = ... }})"))),
            },
            CoinConfig::Custom { custom } => {
                let d = custom.len();
                if custom.iter().any(|row| row.len() != d) {
                    return Err(self.invalid("custom coin must be square"));
                }
                let data = custom.iter().flatten().map(|z| z.value()).collect();
                let m = DenseMatrix::from_row_major(d, data).map_err(|e| self.invalid(&e.to_string()))?;
                Ok(CoinSpec::Custom(m))
            }
        }
    }

    pub fn coin_init(&self) -> Result<CoinInit, RunError> {
        match &self.walk.coin_init {
            CoinInitConfig::Named(n) => match n.as_str() {
                "symmetric_plus_i" => Ok(CoinInit::SymmetricPlusI),
                "grover_symmetric" => Ok(CoinInit::GroverSymmetric),
                "up" => Ok(CoinInit::Basis(0)),
                "down" => Ok(CoinInit::Basis(1)),
                other => Err(self.invalid(&format!("unknown coin_init {other:?}"))),
            },
            CoinInitConfig::Basis { basis } => Ok(CoinInit::Basis(*basis)),
            CoinInitConfig::Custom { custom } => Ok(CoinInit::Custom(custom.iter().map(|z| z.value()).collect())),
        }
    }

    /// Sizes truncated algebras and converts everything to core types.
    pub fn resolve(&self, seed: Option<u64>) -> Result<ResolvedCase, RunError> {
        let steps = self.steps()?;
        let beta = self.walk.beta.value();
        if !(beta.re.is_finite() && beta.im.is_finite()) {
            return Err(self.invalid("beta must be finite"));
        }
        if self.walk.record_every == 0 {
            return Err(self.invalid("record_every must be at least 1"));
        }
        let t = &self.truncation;
        if !(t.safety.is_finite() && t.safety > 0.0) || !(t.leakage_threshold >= 0.0) {
            return Err(self.invalid("truncation.safety must be positive and leakage_threshold non-negative"));
        }
        let root_betas = self.walk.root_betas.as_ref().map(|v| v.iter().map(|z| z.value()).collect::<Vec<_>>());
        let max_beta = root_betas.as_ref().map_or(beta.norm(), |v| v.iter().map(|z| z.norm()).fold(beta.norm(), f64::max));
        let state = self.state.spec();
        let (params, auto_truncation) = self.algebra_params(&state, steps, max_beta)?;
        let mut walk = WalkConfig::new(0.0, steps, self.coin()?, self.coin_init()?);
        walk.beta = beta;
        walk.root_betas = root_betas;
        let options = WalkOptions { leakage_threshold: t.leakage_threshold, guard_sites: t.guard_sites, ..WalkOptions::default() };
        let noise = match &self.noise {
            Some(n) => {
                let Some(master_seed) = seed else {
                    return Err(self.invalid("a seed is required when noise is present"));
                };
                let spec = NoiseSpec {
                    epsilon: n.epsilon,
                    realizations: n.realizations,
                    master_seed,
                    placement: match n.placement {
                        Placement::BeforeCoin => NoisePlacement::BeforeCoin,
                        Placement::AfterCoin => NoisePlacement::AfterCoin,
                    },
                };
                spec.validate().map_err(|e| self.invalid(&e.to_string()))?;
                Some(spec)
            }
            None => None,
        };
        if self.fit.max_step.is_some_and(|m| m < self.fit.min_step) {
            return Err(self.invalid("fit.max_step is below fit.min_step"));
        }
        Ok(ResolvedCase { params, auto_truncation, state, walk, record_every: self.walk.record_every, options, noise })
    }

    fn algebra_params(&self, state: &StateSpec, steps: usize, beta: f64) -> Result<(AlgebraParams, bool), RunError> {
        let guard = self.truncation.guard_sites;
        Ok(match &self.algebra {
            AlgebraConfig::Hw { n_max: Some(n) } => (AlgebraParams::HeisenbergWeyl { n_max: *n }, false),
            AlgebraConfig::Hw { n_max: None } => {
                let alpha = match state {
                    StateSpec::GlauberCoherent(a) => a.norm(),
                    StateSpec::Fock(l) if l.len() == 1 && l[0] >= 0 => (l[0] as f64).sqrt(),
                    _ => return Err(self.invalid("automatic hw truncation needs a glauber or fock start; set n_max")),
                };
                let n_max = hw_auto_n_max(alpha, steps, beta, self.truncation.safety, guard);
                (AlgebraParams::HeisenbergWeyl { n_max }, true)
            }
            AlgebraConfig::Su2 { two_s } => (AlgebraParams::Su2 { two_s: *two_s }, false),
            AlgebraConfig::Su3 { n } => (AlgebraParams::Su3 { n: *n }, false),
            AlgebraConfig::So5 { n } => (AlgebraParams::So5 { n: *n }, false),
            AlgebraConfig::E2 { window: Some(w) } => (AlgebraParams::Euclidean2 { window: *w }, false),
            AlgebraConfig::E2 { window: None } => {
                let j0 = match state {
                    StateSpec::E2Site(j) => j.unsigned_abs() as f64,
                    _ => return Err(self.invalid("automatic e2 window needs an e2_site start; set window")),
                };
                (AlgebraParams::Euclidean2 { window: e2_auto_window(j0, steps, beta, guard) }, true)
            }
            AlgebraConfig::Su11 { sector, n_max: Some(n) } => {
                (AlgebraParams::Su11 { sector: (*sector).into(), n_max: *n }, false)
            }
            AlgebraConfig::Su11 { sector, n_max: None } => {
                let xi = match state {
                    StateSpec::SqueezedVacuum(z) => z.norm(),
                    StateSpec::Fock(l) if l.len() == 1 && l[0] <= 1 => 0.0,
                    _ => return Err(self.invalid("automatic su11 truncation needs a squeezed or floor start; set n_max")),
                };
                let sector: Su11Sector = (*sector).into();
                (AlgebraParams::Su11 { sector, n_max: su11_auto_n_max(xi, steps, beta, sector, guard) }, true)
            }
        })
    }
}

/// Window for an e(2) walk from `|j0|`: the walk cannot outrun `2 beta m`,
/// plus Bessel tail room and the guard band.
pub fn e2_auto_window(j0: f64, steps: usize, beta: f64, guard_sites: usize) -> u32 {
    let reach = 2.0 * beta * steps as f64;
    (j0 + reach + 4.0 * reach.cbrt() + 30.0).ceil() as u32 + guard_sites as u32
}

/// su(1,1) truncation: the squeezing after `m` steps is at most
/// `r = |xi| + m |beta|` and the number distribution decays like
/// `tanh(r)^(n/2)`, so keep pairs until that reaches `1e-16`.
pub fn su11_auto_n_max(xi: f64, steps: usize, beta: f64, sector: Su11Sector, guard_sites: usize) -> usize {
    let r = xi + steps as f64 * beta;
    let pairs = if r <= 0.0 { 0.0 } else { (16.0 * std::f64::consts::LN_10 / -r.tanh().ln()).ceil() };
    2 * (pairs as usize + 20 + guard_sites) + sector.parity()
}
