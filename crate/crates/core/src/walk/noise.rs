//! Stochastic coin dephasing.
//!
//! Every step draws an angle `theta ~ N(0, epsilon^2)` and applies
//! `diag(e^{i theta}, e^{-i theta})` to the coin. Angles come from a ChaCha
//! stream keyed by the master seed, selected by the realization index and
//! positioned by the step index, so any realization can be replayed alone.

use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{WalkConfig, WalkError, WalkOptions, Walker, WalkerState};
use crate::algebra::AlgebraRep;
use crate::numerics::compensated_sum;

/// Where the random rotation sits relative to the coin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoisePlacement {
    BeforeCoin,
    #[default]
    AfterCoin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Standard deviation of the per-step angle.
    pub epsilon: f64,
    pub realizations: usize,
    pub master_seed: u64,
    pub placement: NoisePlacement,
}

impl NoiseSpec {
    pub fn new(epsilon: f64, realizations: usize, master_seed: u64) -> Self {
        NoiseSpec { epsilon, realizations, master_seed, placement: NoisePlacement::AfterCoin }
    }

    pub fn validate(&self) -> Result<(), WalkError> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(WalkError::InvalidParam("epsilon must be finite and non-negative"));
        }
        if self.realizations == 0 {
            return Err(WalkError::InvalidParam("at least one realization is required"));
        }
        Ok(())
    }
}

/// Rotation angle for `step` (1-based) of `realization`.
pub fn noise_angle(spec: &NoiseSpec, realization: usize, step: usize) -> f64 {
    if spec.epsilon == 0.0 {
        return 0.0;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.master_seed);
    rng.set_stream(realization as u64);
    // 256 words per step is far more than one normal draw consumes
    rng.set_word_pos((step as u128) << 8);
    let z: f64 = StandardNormal.sample(&mut rng);
    spec.epsilon * z
}

/// Coin-summed site probabilities of one realization at each recorded step.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationTrace {
    pub steps: Vec<usize>,
    pub marginals: Vec<Vec<f64>>,
    pub leakage: f64,
}

/// Site marginal `sum_c |psi(c, s)|^2`.
pub fn site_marginal(state: &WalkerState) -> Vec<f64> {
    let n = state.site_count();
    (0..n)
        .map(|s| compensated_sum((0..state.coin_dim()).map(|c| state.amplitudes()[c * n + s].norm_sqr())))
        .collect()
}

/// Runs one noisy trajectory and records the site marginal every
/// `record_every` steps, starting with step 0.
pub fn run_realization(
    walker: &Walker<'_>,
    initial: &WalkerState,
    steps: usize,
    noise: &NoiseSpec,
    realization: usize,
    record_every: usize,
) -> Result<RealizationTrace, WalkError> {
    if record_every == 0 {
        return Err(WalkError::InvalidParam("record_every must be at least 1"));
    }
    if initial.coin_dim() != 2 {
        return Err(WalkError::Unsupported("coin dephasing needs a two-state coin"));
    }
    let mut state = initial.clone();
    let mut trace = RealizationTrace { steps: alloc::vec![0], marginals: alloc::vec![site_marginal(&state)], leakage: 0.0 };
    for m in 1..=steps {
        let angle = noise_angle(noise, realization, m);
        walker.step_with_rotation(&mut state, m, angle, noise.placement)?;
        if m % record_every == 0 {
            trace.steps.push(m);
            trace.marginals.push(site_marginal(&state));
        }
    }
    trace.leakage = state.leakage();
    Ok(trace)
}

/// Running sum of realization traces, added in realization order.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseAccumulator {
    steps: Vec<usize>,
    sums: Vec<Vec<f64>>,
    count: usize,
    leakage: f64,
}

impl NoiseAccumulator {
    pub fn new() -> Self {
        NoiseAccumulator { steps: Vec::new(), sums: Vec::new(), count: 0, leakage: 0.0 }
    }

    pub fn add(&mut self, trace: &RealizationTrace) {
        if self.count == 0 {
            self.steps = trace.steps.clone();
            self.sums = trace.marginals.clone();
        } else {
            for (sum, p) in self.sums.iter_mut().zip(&trace.marginals) {
                sum.iter_mut().zip(p).for_each(|(a, b)| *a += b);
            }
        }
        self.count += 1;
        self.leakage = self.leakage.max(trace.leakage);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(self) -> NoisyOutcome {
        let k = self.count.max(1) as f64;
        let averages = self.sums.into_iter().map(|v| v.into_iter().map(|x| x / k).collect()).collect();
        NoisyOutcome { steps: self.steps, averages, realizations: self.count, leakage: self.leakage }
    }
}

impl Default for NoiseAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

/// Ensemble-averaged site marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyOutcome {
    pub steps: Vec<usize>,
    pub averages: Vec<Vec<f64>>,
    pub realizations: usize,
    /// Largest guard band probability over all realizations.
    pub leakage: f64,
}

/// Serial noisy evolution over all realizations.
pub fn evolve_noisy(
    initial: &WalkerState,
    rep: &AlgebraRep,
    config: &WalkConfig,
    opts: &WalkOptions,
    noise: &NoiseSpec,
    record_every: usize,
) -> Result<NoisyOutcome, WalkError> {
    noise.validate()?;
    let walker = Walker::new(rep, config, *opts)?;
    let mut acc = NoiseAccumulator::new();
    for r in 0..noise.realizations {
        acc.add(&run_realization(&walker, initial, config.steps, noise, r, record_every)?);
    }
    Ok(acc.finish())
}
