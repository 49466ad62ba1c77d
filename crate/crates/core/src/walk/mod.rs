//! Coins, coin-conditioned displacements, stroboscopic evolution and the
//! Trotter continuum reference.
//!
//! One step is `W = U_w U_c`: the coin acts first, then each coin block `2i`
//! is displaced by `D_i(+beta)` and block `2i + 1` by `D_i(-beta)`.

mod noise;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::AlgebraRep;
use crate::numerics::{expm_apply_with, norm_sqr, ComplexVector, DenseMatrix, ExpmOptions, NumericsError, SparseOperator};
use crate::states::{CoinInit, StateError};
use crate::C64;

pub use noise::{
    evolve_noisy, noise_angle, run_realization, site_marginal, NoiseAccumulator, NoisePlacement, NoiseSpec, NoisyOutcome,
    RealizationTrace,
};

/// Default probability allowed inside the guard band.
pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 1e-8;
/// Default guard band width in lattice steps.
pub const DEFAULT_GUARD_SITES: usize = 16;
/// Krylov budget per exponential; large steps on highly excited states need
/// a few hundred generator applications.
pub const DEFAULT_EXPM_BUDGET: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub enum CoinSpec {
    Hadamard,
    Grover,
    Custom(DenseMatrix),
}

impl CoinSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CoinSpec::Hadamard => "hadamard",
            CoinSpec::Grover => "grover",
            CoinSpec::Custom(_) => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    /// Step amplitude shared by all roots.
    pub beta: C64,
    /// Optional per-root amplitudes overriding `beta`.
    pub root_betas: Option<Vec<C64>>,
    pub steps: usize,
    pub coin: CoinSpec,
    pub coin_init: CoinInit,
}

impl WalkConfig {
    pub fn new(beta: f64, steps: usize, coin: CoinSpec, coin_init: CoinInit) -> Self {
        WalkConfig { beta: C64::new(beta, 0.0), root_betas: None, steps, coin, coin_init }
    }

    pub fn beta_for_root(&self, root: usize) -> C64 {
        self.root_betas.as_ref().and_then(|b| b.get(root).copied()).unwrap_or(self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkOptions {
    pub expm: ExpmOptions,
    /// Largest probability tolerated within the guard band.
    pub leakage_threshold: f64,
    /// Guard band width for truncated representations.
    pub guard_sites: usize,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions {
            expm: ExpmOptions { max_applications: DEFAULT_EXPM_BUDGET, ..ExpmOptions::default() },
            leakage_threshold: DEFAULT_LEAKAGE_THRESHOLD,
            guard_sites: DEFAULT_GUARD_SITES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WalkError {
    #[error("invalid coin: {0}")]
    Coin(&'static str),
    #[error("state has {got} amplitudes, the walk needs {expected}")]
    StateShape { expected: usize, got: usize },
    #[error("probability {mass:e} reached the truncation guard band at step {step}")]
    Leakage { step: usize, mass: f64 },
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Coin matrix for a `d`-state coin.
pub fn coin_matrix(spec: &CoinSpec, d: usize) -> Result<DenseMatrix, WalkError> {
    match spec {
        CoinSpec::Hadamard => {
            if d != 2 {
                return Err(WalkError::Coin("the Hadamard coin needs d = 2"));
            }
            let h = core::f64::consts::FRAC_1_SQRT_2;
            let data = alloc::vec![C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)];
            Ok(DenseMatrix::from_row_major(2, data)?)
        }
        CoinSpec::Grover => {
            if d < 2 {
                return Err(WalkError::Coin("the Grover coin needs d >= 2"));
            }
            let off = 2.0 / d as f64;
            // (2 - d) / d is correctly rounded, 2/d - 1 is not
            let diag = (2.0 - d as f64) / d as f64;
            let mut m = DenseMatrix::zeros(d);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] = C64::new(if i == j { diag } else { off }, 0.0);
                }
            }
            Ok(m)
        }
        CoinSpec::Custom(m) => {
            if m.dim() != d {
                return Err(WalkError::Coin("custom coin dimension differs from the representation"));
            }
            let prod = m.adjoint().matmul(m);
            if prod.max_abs_diff(&DenseMatrix::identity(d)) > 1e-12 {
                return Err(WalkError::Coin("custom coin is not unitary"));
            }
            Ok(m.clone())
        }
    }
}

/// Amplitudes over (coin, site) stored coin-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    amplitudes: ComplexVector,
    site_count: usize,
    coin_dim: usize,
    leakage: f64,
}

impl WalkerState {
    /// `walker ⊗ coin`.
    pub fn product(walker: &[C64], coin: &[C64]) -> Self {
        let n = walker.len();
        let mut data = Vec::with_capacity(n * coin.len());
        for c in coin {
            data.extend(walker.iter().map(|w| c * w));
        }
        WalkerState {
            amplitudes: ComplexVector::from_vec(data).unwrap_or_default(),
            site_count: n,
            coin_dim: coin.len(),
            leakage: 0.0,
        }
    }

    /// Product state with the coin prepared as `init`.
    pub fn with_coin(walker: &[C64], init: &CoinInit, coin_dim: usize) -> Result<Self, WalkError> {
        Ok(Self::product(walker, &init.vector(coin_dim)?))
    }

    pub fn from_amplitudes(amplitudes: ComplexVector, site_count: usize, coin_dim: usize) -> Result<Self, WalkError> {
        if amplitudes.len() != site_count * coin_dim {
            return Err(WalkError::StateShape { expected: site_count * coin_dim, got: amplitudes.len() });
        }
        Ok(WalkerState { amplitudes, site_count, coin_dim, leakage: 0.0 })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    /// Walker amplitudes paired with coin state `c`.
    pub fn block(&self, c: usize) -> &[C64] {
        &self.amplitudes[c * self.site_count..(c + 1) * self.site_count]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Largest guard band probability seen so far.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    fn check_shape(&self, rep: &AlgebraRep) -> Result<(), WalkError> {
        if self.site_count != rep.site_count() || self.coin_dim != rep.coin_dim() {
            return Err(WalkError::StateShape { expected: rep.state_dim(), got: self.amplitudes.len() });
        }
        Ok(())
    }
}

/// Block-diagonal coin-conditioned displacement.
#[derive(Debug, Clone)]
pub struct ConditionalShift {
    /// `beta_i E+ - conj(beta_i) E-` for each root.
    generators: Vec<SparseOperator>,
    expm: ExpmOptions,
}

impl ConditionalShift {
    pub fn new(rep: &AlgebraRep, config: &WalkConfig, expm: ExpmOptions) -> Result<Self, WalkError> {
        Self::with_betas(rep, &(0..rep.root_count()).map(|i| config.beta_for_root(i)).collect::<Vec<_>>(), expm)
    }

    pub fn with_betas(rep: &AlgebraRep, betas: &[C64], expm: ExpmOptions) -> Result<Self, WalkError> {
        if betas.len() != rep.root_count() {
            return Err(WalkError::InvalidParam("one step amplitude per root is required"));
        }
        if betas.iter().any(|b| !b.re.is_finite() || !b.im.is_finite()) {
            return Err(WalkError::InvalidParam("step amplitude must be finite"));
        }
        let generators = betas
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                SparseOperator::linear_combination(&[(b, &rep.root_raise()[i]), (-b.conj(), &rep.root_lower()[i])])
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ConditionalShift { generators, expm })
    }

    pub fn generator(&self, root: usize) -> &SparseOperator {
        &self.generators[root]
    }

    /// Displaces every coin block in place.
    pub fn apply(&self, state: &mut WalkerState) -> Result<(), WalkError> {
        let n = state.site_count;
        if state.coin_dim != 2 * self.generators.len() {
            return Err(WalkError::StateShape { expected: 2 * self.generators.len() * n, got: state.amplitudes.len() });
        }
        for c in 0..state.coin_dim {
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            let block = &mut state.amplitudes[c * n..(c + 1) * n];
            let out = expm_apply_with(&self.generators[c / 2], block, C64::new(sign, 0.0), &self.expm)?;
            block.copy_from_slice(&out.vector);
        }
        Ok(())
    }
}

/// Applies `coin` to every site: block `c` becomes `sum_c' coin[c][c'] block_c'`.
pub(crate) fn apply_coin(coin: &DenseMatrix, state: &mut WalkerState) {
    let n = state.site_count;
    let d = state.coin_dim;
    let old = state.amplitudes.to_vec();
    for c in 0..d {
        let out = &mut state.amplitudes[c * n..(c + 1) * n];
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for cp in 0..d {
            let w = coin[(c, cp)];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, x) in out.iter_mut().zip(&old[cp * n..(cp + 1) * n]) {
                *o += w * x;
            }
        }
    }
}

/// Precomputed coin, shift and guard band for repeated steps.
#[derive(Debug, Clone)]
pub struct Walker<'a> {
    rep: &'a AlgebraRep,
    coin: DenseMatrix,
    shift: ConditionalShift,
    guard: Vec<usize>,
    opts: WalkOptions,
}

impl<'a> Walker<'a> {
    pub fn new(rep: &'a AlgebraRep, config: &WalkConfig, opts: WalkOptions) -> Result<Self, WalkError> {
        let coin = coin_matrix(&config.coin, rep.coin_dim())?;
        let shift = ConditionalShift::new(rep, config, opts.expm)?;
        let guard = if rep.is_truncated() {
            (0..rep.site_count()).filter(|&s| rep.boundary_distance(s) < opts.guard_sites).collect()
        } else {
            Vec::new()
        };
        Ok(Walker { rep, coin, shift, guard, opts })
    }

    pub fn rep(&self) -> &AlgebraRep {
        self.rep
    }

    pub fn coin(&self) -> &DenseMatrix {
        &self.coin
    }

    /// Initial product state for `config`.
    pub fn initial_state(&self, walker: &[C64], config: &WalkConfig) -> Result<WalkerState, WalkError> {
        if walker.len() != self.rep.site_count() {
            return Err(WalkError::StateShape { expected: self.rep.site_count(), got: walker.len() });
        }
        WalkerState::with_coin(walker, &config.coin_init, self.rep.coin_dim())
    }

    /// One step `U_w U_c`, numbered `step_index` for error reports.
    pub fn step(&self, state: &mut WalkerState, step_index: usize) -> Result<(), WalkError> {
        self.step_with_rotation(state, step_index, 0.0, NoisePlacement::AfterCoin)
    }

    /// One step with an extra coin rotation `diag(e^{i angle}, e^{-i angle})`.
    pub fn step_with_rotation(
        &self,
        state: &mut WalkerState,
        step_index: usize,
        angle: f64,
        placement: NoisePlacement,
    ) -> Result<(), WalkError> {
        state.check_shape(self.rep)?;
        if angle != 0.0 && placement == NoisePlacement::BeforeCoin {
            rotate_coin(state, angle)?;
        }
        apply_coin(&self.coin, state);
        if angle != 0.0 && placement == NoisePlacement::AfterCoin {
            rotate_coin(state, angle)?;
        }
        self.shift.apply(state)?;
        self.check_leakage(state, step_index)
    }

    /// Probability currently inside the guard band.
    pub fn guard_mass(&self, state: &WalkerState) -> f64 {
        let n = state.site_count;
        let mut mass = 0.0;
        for c in 0..state.coin_dim {
            for &s in &self.guard {
                mass += state.amplitudes[c * n + s].norm_sqr();
            }
        }
        mass
    }

    fn check_leakage(&self, state: &mut WalkerState, step_index: usize) -> Result<(), WalkError> {
        if self.guard.is_empty() {
            return Ok(());
        }
        let mass = self.guard_mass(state);
        state.leakage = state.leakage.max(mass);
        if mass > self.opts.leakage_threshold {
            return Err(WalkError::Leakage { step: step_index, mass });
        }
        Ok(())
    }
}

fn rotate_coin(state: &mut WalkerState, angle: f64) -> Result<(), WalkError> {
    if state.coin_dim != 2 {
        return Err(WalkError::Unsupported("coin rotations need a two-state coin"));
    }
    let n = state.site_count;
    let up = C64::from_polar(1.0, angle);
    let down = up.conj();
    state.amplitudes[..n].iter_mut().for_each(|z| *z *= up);
    state.amplitudes[n..].iter_mut().for_each(|z| *z *= down);
    Ok(())
}

/// Builds the block shift for `beta` on `rep` and applies it once.
pub fn conditional_shift(
    rep: &AlgebraRep,
    state: &WalkerState,
    beta: C64,
    opts: &WalkOptions,
) -> Result<WalkerState, WalkError> {
    state.check_shape(rep)?;
    let shift = ConditionalShift::with_betas(rep, &alloc::vec![beta; rep.root_count()], opts.expm)?;
    let mut out = state.clone();
    shift.apply(&mut out)?;
    Ok(out)
}

/// One step of the walk.
pub fn step(
    state: &WalkerState,
    rep: &AlgebraRep,
    config: &WalkConfig,
    opts: &WalkOptions,
) -> Result<WalkerState, WalkError> {
    let walker = Walker::new(rep, config, *opts)?;
    let mut out = state.clone();
    walker.step(&mut out, 1)?;
    Ok(out)
}

/// A recorded state and its step index.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub state: WalkerState,
}

/// Steps through `config.steps` steps, calling `observe` on step 0 and every
/// `record_every` steps after it.
pub fn evolve_observe<F>(
    initial: &WalkerState,
    rep: &AlgebraRep,
    config: &WalkConfig,
    opts: &WalkOptions,
    record_every: usize,
    mut observe: F,
) -> Result<WalkerState, WalkError>
where
    F: FnMut(usize, &WalkerState) -> Result<(), WalkError>,
{
    if record_every == 0 {
        return Err(WalkError::InvalidParam("record_every must be at least 1"));
    }
    let walker = Walker::new(rep, config, *opts)?;
    let mut state = initial.clone();
    state.check_shape(rep)?;
    observe(0, &state)?;
    for m in 1..=config.steps {
        walker.step(&mut state, m)?;
        if m % record_every == 0 {
            observe(m, &state)?;
        }
    }
    Ok(state)
}

/// Deterministic trajectory with snapshots every `record_every` steps.
pub fn evolve(
    initial: &WalkerState,
    rep: &AlgebraRep,
    config: &WalkConfig,
    opts: &WalkOptions,
    record_every: usize,
) -> Result<Vec<Snapshot>, WalkError> {
    let mut out = Vec::new();
    evolve_observe(initial, rep, config, opts, record_every, |step, s| {
        out.push(Snapshot { step, state: s.clone() });
        Ok(())
    })?;
    Ok(out)
}

/// Coin operator coupling the walker generator in the continuum limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuumCoupling {
    /// `(sigma_z + C sigma_z C^dagger) / 2`, the two-step average for an
    /// involutory coin `C`.
    CoinAveraged,
    /// `sigma_x`.
    SigmaX,
}

/// `exp(T (E+ - E-) ⊗ Sigma) |state>` for single-root algebras.
pub fn continuum_reference(
    state: &WalkerState,
    rep: &AlgebraRep,
    coin: &CoinSpec,
    t: f64,
    coupling: ContinuumCoupling,
    opts: &WalkOptions,
) -> Result<WalkerState, WalkError> {
    if rep.root_count() != 1 {
        return Err(WalkError::Unsupported("continuum reference needs a single root pair"));
    }
    state.check_shape(rep)?;
    let sigma = continuum_coupling_matrix(coin, coupling)?;
    let n = rep.site_count();
    let x = SparseOperator::linear_combination(&[
        (C64::new(1.0, 0.0), &rep.root_raise()[0]),
        (C64::new(-1.0, 0.0), &rep.root_lower()[0]),
    ])?;
    let mut t_list = Vec::new();
    for c in 0..2 {
        for cp in 0..2 {
            let w = sigma[(c, cp)];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for (r, col, v) in x.triplets() {
                t_list.push((c * n + r, cp * n + col, w * v));
            }
        }
    }
    let gen = SparseOperator::from_triplets(2 * n, 2 * n, &t_list)?;
    let out = expm_apply_with(&gen, state.amplitudes(), C64::new(t, 0.0), &opts.expm)?;
    let mut result = WalkerState::from_amplitudes(out.vector, n, 2)?;
    result.leakage = state.leakage;
    Ok(result)
}

/// The 2x2 coin-space factor of the continuum generator.
pub fn continuum_coupling_matrix(coin: &CoinSpec, coupling: ContinuumCoupling) -> Result<DenseMatrix, WalkError> {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    match coupling {
        ContinuumCoupling::SigmaX => Ok(DenseMatrix::from_row_major(2, alloc::vec![z, one, one, z])?),
        ContinuumCoupling::CoinAveraged => {
            let c = coin_matrix(coin, 2)?;
            if c.matmul(&c).max_abs_diff(&DenseMatrix::identity(2)) > 1e-12 {
                return Err(WalkError::Unsupported("coin-averaged coupling needs an involutory coin"));
            }
            let sz = DenseMatrix::from_row_major(2, alloc::vec![one, z, z, -one])?;
            let rotated = c.matmul(&sz).matmul(&c.adjoint());
            let mut avg = DenseMatrix::zeros(2);
            for i in 0..2 {
                for j in 0..2 {
                    avg[(i, j)] = (sz[(i, j)] + rotated[(i, j)]) * 0.5;
                }
            }
            // exact hermiticity keeps the doubled generator anti-Hermitian
            avg[(1, 0)] = avg[(0, 1)].conj();
            avg[(0, 0)].im = 0.0;
            avg[(1, 1)].im = 0.0;
            Ok(avg)
        }
    }
}

/// Heisenberg-Weyl truncation for a coherent start of amplitude `alpha`
/// walked `steps` times with amplitude `beta`: the excursion estimate
/// `ceil((sqrt(2) alpha + m beta c)^2 / 2)` plus six Poisson widths and the
/// guard band.
pub fn hw_auto_n_max(alpha: f64, steps: usize, beta: f64, safety: f64, guard_sites: usize) -> usize {
    let x = 2f64.sqrt() * alpha.abs() + steps as f64 * beta.abs() * safety;
    let n_est = (x * x / 2.0).ceil();
    let tail = (6.0 * n_est.sqrt()).ceil() + 40.0;
    n_est as usize + tail as usize + guard_sites
}

/// Norm of a raw amplitude slice.
pub fn amplitude_norm(v: &[C64]) -> f64 {
    norm_sqr(v).sqrt()
}

/// Bare single-root displacement `D(beta)` of walker amplitudes.
pub fn displace(rep: &AlgebraRep, walker: &[C64], beta: C64, root: usize, expm: &ExpmOptions) -> Result<ComplexVector, WalkError> {
    if root >= rep.root_count() {
        return Err(WalkError::InvalidParam("root index out of range"));
    }
    let gen = SparseOperator::linear_combination(&[(beta, &rep.root_raise()[root]), (-beta.conj(), &rep.root_lower()[root])])?;
    Ok(expm_apply_with(&gen, walker, C64::new(1.0, 0.0), expm)?.vector)
}
