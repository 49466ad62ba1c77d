//! Built-in scenarios.

use std::f64::consts::FRAC_PI_2;

use crate::config::{
    AlgebraConfig, CaseConfig, CoinConfig, CoinInitConfig, Complex, FitConfig, NoiseConfig, Placement,
    ScenarioConfig, StateConfig, TruncationConfig, WalkSection,
};

/// Seed shared by every preset.
pub const PRESET_SEED: u64 = 2024;

/// Name and one-line description of every preset.
pub const PRESETS: [(&str, &str); 7] = [
    ("fig2a", "hw, alpha = 40, beta = 1/2, 60 steps: overlapping coherent states"),
    ("fig2b", "hw, alpha = 40, beta = 1, 30 steps: ballistic two-peak walk"),
    ("fig3", "su(2), S = 2500, zeta = 0.01i and 0.05i, snapshots at 0, 25, 50, 75"),
    ("fig4a", "su(3), N = 120, beta = 0.2, 5 steps, Grover coin, coherent start"),
    ("fig4b", "so(5), N = 120, beta = 0.2, 5 steps, Grover coin, Gaussian start"),
    ("fig5", "su(3) and so(5), N = 120, T = 1 at beta = 0.5, 0.2, 0.1, 0.02"),
    ("fig6", "hw, alpha = 30, beta = 1/2, dephasing eps = 0, 0.1, 0.3, 1.0, 400 realizations, 60 steps"),
];

/// Dephasing strengths of the fig6 sweep.
pub const FIG6_EPSILONS: [f64; 4] = [0.0, 0.1, 0.3, 1.0];
/// Step amplitudes of the fig5 sweep.
pub const FIG5_BETAS: [f64; 4] = [0.5, 0.2, 0.1, 0.02];

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    let cases = match name {
        "fig2a" => vec![hw_case("beta0.5", 40.0, 0.5, 60, FitConfig { min_step: 10, max_step: Some(60) })],
        "fig2b" => vec![hw_case("beta1", 40.0, 1.0, 30, FitConfig { min_step: 10, max_step: Some(30) })],
        "fig3" => [0.01, 0.05].iter().map(|&z| su2_case(z)).collect(),
        "fig4a" => vec![su3_case("su3", 0.2, 5, 1)],
        "fig4b" => vec![so5_case("so5", 0.2, 5, 1)],
        "fig5" => {
            let mut cases = Vec::new();
            for &beta in &FIG5_BETAS {
                let steps = (1.0 / beta).round() as usize;
                cases.push(su3_case(&format!("su3-beta{beta}"), beta, steps, steps));
            }
            for &beta in &FIG5_BETAS {
                let steps = (1.0 / beta).round() as usize;
                cases.push(so5_case(&format!("so5-beta{beta}"), beta, steps, steps));
            }
            cases
        }
        "fig6" => FIG6_EPSILONS
            .iter()
            .map(|&eps| {
                let mut case = hw_case(&format!("eps{eps}"), 30.0, 0.5, 60, FitConfig { min_step: 5, max_step: Some(60) });
                case.noise = Some(NoiseConfig { epsilon: eps, realizations: 400, placement: Placement::AfterCoin });
                case
            })
            .collect(),
        _ => return None,
    };
    Some(ScenarioConfig {
        name: name.to_string(),
        seed: Some(PRESET_SEED),
        output: None,
        memory_limit_mb: None,
        probability_floor: None,
        cases,
    })
}

fn walk(beta: Complex, steps: usize, record_every: usize, coin: &str, coin_init: &str) -> WalkSection {
    WalkSection {
        beta,
        root_betas: None,
        steps: Some(steps),
        total_time: None,
        record_every,
        coin: CoinConfig::Named(coin.to_string()),
        coin_init: CoinInitConfig::Named(coin_init.to_string()),
    }
}

fn hw_case(name: &str, alpha: f64, beta: f64, steps: usize, fit: FitConfig) -> CaseConfig {
    CaseConfig {
        name: name.to_string(),
        algebra: AlgebraConfig::Hw { n_max: None },
        state: StateConfig::Glauber { alpha: Complex::Real(alpha) },
        walk: walk(Complex::Real(beta), steps, 1, "hadamard", "symmetric_plus_i"),
        noise: None,
        fit,
        truncation: TruncationConfig::default(),
    }
}

/// The equatorial start along +y with an imaginary step; the coin starts in
/// `up` because `(up + i down)/sqrt 2` leaves `P(l)` exactly mirror symmetric.
fn su2_case(zeta: f64) -> CaseConfig {
    CaseConfig {
        name: format!("zeta{zeta}"),
        algebra: AlgebraConfig::Su2 { two_s: 5000 },
        state: StateConfig::SpinCoherent { theta: FRAC_PI_2, phi: FRAC_PI_2 },
        walk: walk(Complex::Pair([0.0, zeta]), 75, 25, "hadamard", "up"),
        noise: None,
        fit: FitConfig::default(),
        truncation: TruncationConfig::default(),
    }
}

fn su3_case(name: &str, beta: f64, steps: usize, record_every: usize) -> CaseConfig {
    let b = Complex::Real(1.0 / 3f64.sqrt());
    CaseConfig {
        name: name.to_string(),
        algebra: AlgebraConfig::Su3 { n: 120 },
        state: StateConfig::Su3Coherent { b: [b; 3] },
        walk: walk(Complex::Real(beta), steps, record_every, "grover", "grover_symmetric"),
        noise: None,
        fit: FitConfig { min_step: 1, max_step: None },
        truncation: TruncationConfig::default(),
    }
}

fn so5_case(name: &str, beta: f64, steps: usize, record_every: usize) -> CaseConfig {
    CaseConfig {
        name: name.to_string(),
        algebra: AlgebraConfig::So5 { n: 120 },
        state: StateConfig::Gaussian { center: vec![0.0, 0.0], sigma: 120f64.sqrt() / 2.0 },
        walk: walk(Complex::Real(beta), steps, record_every, "grover", "grover_symmetric"),
        noise: None,
        fit: FitConfig { min_step: 1, max_step: None },
        truncation: TruncationConfig::default(),
    }
}
