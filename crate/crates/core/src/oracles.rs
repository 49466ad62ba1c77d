//! Closed-form and brute-force references: the ideal line walk, the e(2)
//! kernel and its momentum-space evaluation, su(1,1) moments and
//! coherent-state overlaps.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{AlgebraKind, Su11Sector};
use crate::C64;

use core::f64::consts::{FRAC_1_SQRT_2, PI};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("window too small: {mass:e} of the kernel lies outside it")]
    WindowTooSmall { mass: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("no closed form for {0:?}")]
    Unsupported(AlgebraKind),
}

/// `J_0(x) ..= J_lmax(x)` by Miller's downward recurrence, normalized with
/// `J_0 + 2 sum J_2k = 1`.
pub fn bessel_j_sequence(x: f64, lmax: usize) -> Vec<f64> {
    let mut out = alloc::vec![0.0; lmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = (lmax as f64).max(ax);
    let mut start = (top + 20.0 + (40.0 * top).sqrt()) as usize;
    start += start % 2;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / ax * cur - next;
        next = cur;
        cur = prev;
        if k - 1 <= lmax {
            out[k - 1] = cur;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            // rescale to stay finite
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            out.iter_mut().skip(k - 1).for_each(|v| *v *= s);
        }
    }
    norm += cur;
    out.iter_mut().for_each(|v| *v /= norm);
    if x < 0.0 {
        out.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
    }
    out
}

/// `J_l(x)` for any integer order.
pub fn bessel_j(l: i64, x: f64) -> f64 {
    let seq = bessel_j_sequence(x, l.unsigned_abs() as usize);
    let v = seq[l.unsigned_abs() as usize];
    if l < 0 && l % 2 != 0 {
        -v
    } else {
        v
    }
}

/// Amplitudes of the Hadamard walk on the integer line after `m` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealWalkState {
    pub m: usize,
    /// Indexed by `j + m` for `j` in `-m..=m`.
    pub up: Vec<C64>,
    pub down: Vec<C64>,
}

impl IdealWalkState {
    pub fn probability(&self, j: i64) -> f64 {
        if j.unsigned_abs() as usize > self.m {
            return 0.0;
        }
        let i = (j + self.m as i64) as usize;
        self.up[i].norm_sqr() + self.down[i].norm_sqr()
    }

    /// `(j, P(j))` for every site in `-m..=m`.
    pub fn probabilities(&self) -> Vec<(i64, f64)> {
        (-(self.m as i64)..=self.m as i64).map(|j| (j, self.probability(j))).collect()
    }
}

/// Hadamard coin then a unit shift, `up` moving right, from `|0> (x) coin`.
pub fn ideal_dtqw(m: usize, coin: [C64; 2]) -> IdealWalkState {
    let len = 2 * m + 1;
    let zero = C64::new(0.0, 0.0);
    let mut up = alloc::vec![zero; len];
    let mut down = alloc::vec![zero; len];
    up[m] = coin[0];
    down[m] = coin[1];
    for _ in 0..m {
        let mut nu = alloc::vec![zero; len];
        let mut nd = alloc::vec![zero; len];
        for i in 0..len {
            let a = (up[i] + down[i]) * FRAC_1_SQRT_2;
            let b = (up[i] - down[i]) * FRAC_1_SQRT_2;
            if a != zero {
                nu[i + 1] = a;
            }
            if b != zero {
                nd[i - 1] = b;
            }
        }
        up = nu;
        down = nd;
    }
    IdealWalkState { m, up, down }
}

/// Coin-resolved kernel of the e(2) Hadamard walk: after `m` steps from
/// `|j0> (x) chi` the coin spinor at `j` is `K_{j - j0} chi`.
#[derive(Debug, Clone, PartialEq)]
pub struct E2Kernel {
    pub m: usize,
    pub beta: f64,
    pub window: usize,
    /// Row-major 2x2 blocks indexed by `j + window`.
    pub blocks: Vec<[C64; 4]>,
}

const KERNEL_TAIL: f64 = 1e-14;
const BESSEL_CUTOFF: f64 = 1e-18;

impl E2Kernel {
    pub fn block(&self, j: i64) -> [C64; 4] {
        if j.unsigned_abs() as usize > self.window {
            return [C64::new(0.0, 0.0); 4];
        }
        self.blocks[(j + self.window as i64) as usize]
    }

    /// `P(j)` for initial coin `chi`, indexed by `j + window`.
    pub fn probabilities(&self, chi: [C64; 2]) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|k| (k[0] * chi[0] + k[1] * chi[1]).norm_sqr() + (k[2] * chi[0] + k[3] * chi[1]).norm_sqr())
            .collect()
    }

    /// `sum_j ||K_j||_F^2 / 2`, one for a unitary walk.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|k| k.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum::<f64>() / 2.0
    }
}

/// Iterates the one-step convolution `psi_up(j) <- sum_l J_l(2 beta) (H psi)_up(j - l)`,
/// `psi_down(j) <- sum_l J_l(-2 beta) (H psi)_down(j - l)` on the 2x2 kernel.
pub fn e2_kernel(m: usize, beta: f64, window: usize) -> Result<E2Kernel, OracleError> {
    if !beta.is_finite() {
        return Err(OracleError::InvalidArgument("beta must be finite"));
    }
    let x = 2.0 * beta;
    let mut taps = bessel_j_sequence(x, 64 + (4.0 * x.abs()) as usize);
    while taps.len() > 1 && taps.last().map_or(false, |v| v.abs() < BESSEL_CUTOFF) {
        taps.pop();
    }
    let reach = taps.len() - 1;
    let half = window.max(m * reach);
    let len = 2 * half + 1;
    let zero = C64::new(0.0, 0.0);
    let mut k = alloc::vec![[zero; 4]; len];
    k[half] = [C64::new(1.0, 0.0), zero, zero, C64::new(1.0, 0.0)];
    let h = FRAC_1_SQRT_2;
    let mut lo = half;
    let mut hi = half;
    for _ in 0..m {
        // coin: rows of H K
        let hk: Vec<[C64; 4]> = k
            .iter()
            .map(|b| [(b[0] + b[2]) * h, (b[1] + b[3]) * h, (b[0] - b[2]) * h, (b[1] - b[3]) * h])
            .collect();
        let mut next = alloc::vec![[zero; 4]; len];
        let nlo = lo.saturating_sub(reach);
        let nhi = (hi + reach).min(len - 1);
        for (j, out) in next.iter_mut().enumerate().take(nhi + 1).skip(nlo) {
            for (l, &a) in taps.iter().enumerate() {
                let l = l as i64;
                let mirrored = if l == 0 { 1 } else { 2 };
                for (dl, sign) in [(l, 1.0), (-l, if l % 2 == 0 { 1.0 } else { -1.0 })].into_iter().take(mirrored) {
                    let src = j as i64 - dl;
                    if src < lo as i64 || src > hi as i64 {
                        continue;
                    }
                    let s = &hk[src as usize];
                    // J_{-l}(x) = (-1)^l J_l(x) and J_l(-x) = (-1)^l J_l(x)
                    let up = a * sign;
                    let down = if dl.rem_euclid(2) == 0 { up } else { -up };
                    out[0] += s[0] * up;
                    out[1] += s[1] * up;
                    out[2] += s[2] * down;
                    out[3] += s[3] * down;
                }
            }
        }
        k = next;
        lo = nlo;
        hi = nhi;
    }
    let outside: f64 = k
        .iter()
        .enumerate()
        .filter(|(j, _)| (*j as i64 - half as i64).unsigned_abs() as usize > window)
        .map(|(_, b)| b.iter().map(|z| z.norm_sqr()).sum::<f64>() / 2.0)
        .sum();
    if outside > KERNEL_TAIL {
        return Err(OracleError::WindowTooSmall { mass: outside });
    }
    let blocks = k[half - window..=half + window].to_vec();
    Ok(E2Kernel { m, beta, window, blocks })
}

/// Momentum-space Hadamard step `W(k) = diag(e^{-i phi}, e^{i phi}) H`,
/// `phi = 2 beta sin k`, row-major.
fn e2_step_matrix(beta: f64, k: f64) -> [C64; 4] {
    let phi = 2.0 * beta * k.sin();
    let up = C64::from_polar(FRAC_1_SQRT_2, -phi);
    let down = C64::from_polar(FRAC_1_SQRT_2, phi);
    [up, up, down, -down]
}

/// `P(j, m)` for `j` in `-j_max..=j_max` from `|0> (x) chi`, by trapezoidal
/// quadrature over `points` momenta of the eigen-expansion
/// `sum_pm c_pm lambda_pm^m |w_pm>`.
pub fn e2_momentum_probabilities(
    m: usize,
    beta: f64,
    chi: [C64; 2],
    j_max: usize,
    points: usize,
) -> Result<Vec<f64>, OracleError> {
    if points < 4096 {
        return Err(OracleError::InvalidArgument("at least 4096 quadrature points are required"));
    }
    if points <= 2 * j_max + 2 * m {
        return Err(OracleError::InvalidArgument("too few quadrature points for the requested range"));
    }
    let zero = C64::new(0.0, 0.0);
    let width = 2 * j_max + 1;
    let mut psi = alloc::vec![[zero; 2]; width];
    let dk = 2.0 * PI / points as f64;
    for q in 0..points {
        let k = -PI + q as f64 * dk;
        let v = evolve_spinor(e2_step_matrix(beta, k), chi, m);
        for (idx, out) in psi.iter_mut().enumerate() {
            let j = idx as f64 - j_max as f64;
            let phase = C64::from_polar(1.0 / points as f64, k * j);
            out[0] += phase * v[0];
            out[1] += phase * v[1];
        }
    }
    Ok(psi.iter().map(|p| p[0].norm_sqr() + p[1].norm_sqr()).collect())
}

/// `W^m chi` through the eigenvectors of the 2x2 unitary `w`, with repeated
/// multiplication when the eigenvalues nearly coincide.
fn evolve_spinor(w: [C64; 4], chi: [C64; 2], m: usize) -> [C64; 2] {
    let tr = w[0] + w[3];
    let det = w[0] * w[3] - w[1] * w[2];
    let disc = (tr * tr * 0.25 - det).sqrt();
    let lambdas = [tr * 0.5 + disc, tr * 0.5 - disc];
    if (lambdas[0] - lambdas[1]).norm() < 1e-6 {
        let mut v = chi;
        for _ in 0..m {
            v = [w[0] * v[0] + w[1] * v[1], w[2] * v[0] + w[3] * v[1]];
        }
        return v;
    }
    let mut out = [C64::new(0.0, 0.0); 2];
    for &lambda in &lambdas {
        // (W - lambda) e = 0: take the larger of the two candidate vectors
        let c1 = [w[1], lambda - w[0]];
        let c2 = [lambda - w[3], w[2]];
        let e = if c1[0].norm_sqr() + c1[1].norm_sqr() >= c2[0].norm_sqr() + c2[1].norm_sqr() { c1 } else { c2 };
        let n = (e[0].norm_sqr() + e[1].norm_sqr()).sqrt();
        let e = [e[0] / n, e[1] / n];
        let c = e[0].conj() * chi[0] + e[1].conj() * chi[1];
        let f = c * lambda.powu(m as u32);
        out[0] += f * e[0];
        out[1] += f * e[1];
    }
    out
}

/// Quasi-energy band of the e(2) Hadamard walk.
#[derive(Debug, Clone, PartialEq)]
pub struct E2Dispersion {
    pub k: Vec<f64>,
    /// Branch `omega = asin(sin(2 beta sin k) / sqrt 2)`; the other
    /// eigenvalue is `-e^{-i omega}`.
    pub omega: Vec<f64>,
    pub group_velocity: Vec<f64>,
    /// `max |v_g|` over the samples.
    pub v_max: f64,
}

/// `omega(k)` of the e(2) Hadamard walk.
pub fn e2_omega(beta: f64, k: f64) -> f64 {
    ((2.0 * beta * k.sin()).sin() * FRAC_1_SQRT_2).asin()
}

/// `d omega / dk`.
pub fn e2_group_velocity(beta: f64, k: f64) -> f64 {
    let phi = 2.0 * beta * k.sin();
    2.0 * beta * k.cos() * phi.cos() * FRAC_1_SQRT_2 / e2_omega(beta, k).cos()
}

pub fn e2_dispersion(beta: f64, ks: &[f64]) -> E2Dispersion {
    let omega: Vec<f64> = ks.iter().map(|&k| e2_omega(beta, k)).collect();
    let group_velocity: Vec<f64> = ks.iter().map(|&k| e2_group_velocity(beta, k)).collect();
    let v_max = group_velocity.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    E2Dispersion { k: ks.to_vec(), omega, group_velocity, v_max }
}

/// `max_k |v_g(k)|` from a dense grid refined by golden-section search.
pub fn e2_max_group_velocity(beta: f64) -> f64 {
    let n = 8192;
    let step = 2.0 * PI / n as f64;
    let speed = |k: f64| e2_group_velocity(beta, k).abs();
    let best = (0..n).map(|i| -PI + i as f64 * step).fold((0.0, f64::NEG_INFINITY), |acc, k| {
        let v = speed(k);
        if v > acc.1 {
            (k, v)
        } else {
            acc
        }
    });
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if speed(c) > speed(d) {
            b = d;
        } else {
            a = c;
        }
    }
    speed(0.5 * (a + b)).max(best.1)
}

/// Boson-number moments of the su(1,1) walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11Moments {
    pub mean_n: f64,
    pub var_n: f64,
}

/// How `m` steps of amplitude `beta` translate into a squeezing parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Su11Regime {
    /// `m` displacements in one direction: `r = m |beta|`.
    Displacement,
    /// Continuum limit of the Hadamard walk: the coin-averaged generator has
    /// eigenvalues `+-1/sqrt 2`, so `r = m |beta| / sqrt 2` on both branches.
    HadamardContinuum,
}

/// Moments of `D(r)|k, k>`: `<n> = 2k cosh 2r - 1/2`, `Var n = 2k sinh^2 2r`.
pub fn su11_moments(beta: f64, m: usize, sector: Su11Sector, regime: Su11Regime) -> Su11Moments {
    let r = match regime {
        Su11Regime::Displacement => m as f64 * beta.abs(),
        Su11Regime::HadamardContinuum => m as f64 * beta.abs() * FRAC_1_SQRT_2,
    };
    let k = sector.bargmann();
    let s = (2.0 * r).sinh();
    // 2k cosh 2r - 1/2 written to stay exact at r = 0 for the even sector
    let mean_n = 2.0 * k * (2.0 * r.sinh() * r.sinh()) + 2.0 * k - 0.5;
    Su11Moments { mean_n, var_n: 2.0 * k * s * s }
}

/// Large-`m` slope of `ln Var n` against `m`.
pub fn su11_asymptotic_log_slope(beta: f64, regime: Su11Regime) -> f64 {
    match regime {
        Su11Regime::Displacement => 4.0 * beta.abs(),
        Su11Regime::HadamardContinuum => 4.0 * beta.abs() * FRAC_1_SQRT_2,
    }
}

/// An overlap kept as its logarithm so tiny values stay representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapValue {
    pub ln_value: f64,
}

impl OverlapValue {
    pub fn value(self) -> f64 {
        self.ln_value.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OverlapQuery {
    /// `|<alpha|alpha + beta>| = e^{-|beta|^2 / 2}` between lattice neighbors.
    GlauberNeighbor { beta: C64 },
    /// `|<alpha|alpha e^{i angle}>| = e^{-|alpha|^2 (1 - cos angle)}`.
    CircleWalk { alpha: C64, angle: f64 },
    /// Overlap of number distributions on the circle walk,
    /// `O_l = e^{-|alpha|^2 / 2}`, the same for every `l`.
    NumberDistribution { alpha: C64 },
    /// Squared overlap of spin-coherent states a polar angle `|zeta|`
    /// apart, `cos^{4S}(|zeta| / 2) ~ e^{-S |zeta|^2 / 2}`.
    Su2Neighbor { spin: f64, zeta: f64 },
}

pub fn overlap_formula(query: OverlapQuery) -> Result<OverlapValue, OracleError> {
    let ln_value = match query {
        OverlapQuery::GlauberNeighbor { beta } => -0.5 * beta.norm_sqr(),
        OverlapQuery::CircleWalk { alpha, angle } => -alpha.norm_sqr() * (1.0 - angle.cos()),
        OverlapQuery::NumberDistribution { alpha } => -0.5 * alpha.norm_sqr(),
        OverlapQuery::Su2Neighbor { spin, zeta } => {
            if spin <= 0.0 {
                return Err(OracleError::InvalidArgument("spin must be positive"));
            }
            4.0 * spin * (0.5 * zeta.abs()).cos().ln()
        }
    };
    if ln_value.is_nan() {
        return Err(OracleError::InvalidArgument("overlap arguments must be finite"));
    }
    Ok(OverlapValue { ln_value })
}

/// Neighbor overlap for a lattice generated by `kind`: Glauber for the
/// Heisenberg-Weyl algebra, spin-coherent for su(2) with `extra = S`.
pub fn neighbor_overlap(kind: AlgebraKind, beta: C64, extra: f64) -> Result<OverlapValue, OracleError> {
    match kind {
        AlgebraKind::HeisenbergWeyl => overlap_formula(OverlapQuery::GlauberNeighbor { beta }),
        AlgebraKind::Su2 => overlap_formula(OverlapQuery::Su2Neighbor { spin: extra, zeta: beta.norm() }),
        other => Err(OracleError::Unsupported(other)),
    }
}
