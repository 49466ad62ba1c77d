//! Initial walker and coin states, overlaps, geodesic distances and the
//! su(2) Husimi function.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{AlgebraKind, AlgebraRep};
use crate::numerics::{
    expm_apply_with, ln_binomial, ln_factorial, norm_sqr, ComplexVector, ExpmOptions, NumericsError, SparseOperator,
};
use crate::C64;

/// Tail mass allowed outside a truncated representation.
pub const TAIL_TOLERANCE: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-12;
/// Sector sites at the top of a truncated su(1,1) space counted as tail.
const SU11_TAIL_SITES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// Basis state with a stored label tuple (su(2) labels are `2l`).
    Fock(Vec<i64>),
    GlauberCoherent(C64),
    /// Spin coherent state, north pole `theta = 0` is `|S, S>`.
    SpinCoherent { theta: f64, phi: f64 },
    /// Perelomov state `(b1 a1^dag + b2 a2^dag + b3 a3^dag)^N |0> / sqrt(N!)`.
    Su3Coherent([C64; 3]),
    /// `P(c) ∝ exp(-|c - center|^2 / sigma^2)` over lattice coordinates,
    /// shared equally by sites with equal coordinates.
    GaussianFsl { center: Vec<f64>, sigma: f64 },
    SqueezedVacuum(C64),
    E2Site(i64),
}

impl StateSpec {
    pub fn name(&self) -> &'static str {
        match self {
            StateSpec::Fock(_) => "fock",
            StateSpec::GlauberCoherent(_) => "glauber",
            StateSpec::SpinCoherent { .. } => "spin_coherent",
            StateSpec::Su3Coherent(_) => "su3_coherent",
            StateSpec::GaussianFsl { .. } => "gaussian",
            StateSpec::SqueezedVacuum(_) => "squeezed_vacuum",
            StateSpec::E2Site(_) => "e2_site",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoinInit {
    /// `(up + i down) / sqrt(2)`, two-state coins only.
    SymmetricPlusI,
    /// `(1, ..., 1) / sqrt(d)`.
    GroverSymmetric,
    /// Coin basis state `index`.
    Basis(usize),
    Custom(Vec<C64>),
}

impl CoinInit {
    /// Coin amplitudes for a `d`-state coin.
    pub fn vector(&self, d: usize) -> Result<Vec<C64>, StateError> {
        match self {
            CoinInit::SymmetricPlusI => {
                if d != 2 {
                    return Err(StateError::InvalidSpec("(up + i down)/sqrt(2) needs a two-state coin"));
                }
                let h = core::f64::consts::FRAC_1_SQRT_2;
                Ok(alloc::vec![C64::new(h, 0.0), C64::new(0.0, h)])
            }
            CoinInit::GroverSymmetric => {
                let a = 1.0 / (d as f64).sqrt();
                Ok(alloc::vec![C64::new(a, 0.0); d])
            }
            CoinInit::Basis(i) => {
                if *i >= d {
                    return Err(StateError::InvalidSpec("coin basis index out of range"));
                }
                let mut v = alloc::vec![C64::new(0.0, 0.0); d];
                v[*i] = C64::new(1.0, 0.0);
                Ok(v)
            }
            CoinInit::Custom(v) => {
                if v.len() != d {
                    return Err(StateError::InvalidSpec("custom coin length differs from coin dimension"));
                }
                if (norm_sqr(v).sqrt() - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(StateError::InvalidSpec("custom coin state is not normalized"));
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("state {spec} is not defined for {kind:?}")]
    Incompatible { spec: &'static str, kind: AlgebraKind },
    #[error("truncation drops {mass:e} of the state's probability")]
    TruncationTail { mass: f64 },
    #[error("invalid state specification: {0}")]
    InvalidSpec(&'static str),
    #[error("label is not a lattice site")]
    UnknownLabel,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Walker amplitudes (length `site_count`) of `spec` on `rep`.
pub fn make_state(rep: &AlgebraRep, spec: &StateSpec) -> Result<ComplexVector, StateError> {
    let kind = rep.kind();
    let incompatible = || StateError::Incompatible { spec: spec.name(), kind };
    let mut v = match spec {
        StateSpec::Fock(label) => {
            let s = rep.site_index(label).ok_or(StateError::UnknownLabel)?;
            ComplexVector::basis(rep.site_count(), s)
        }
        StateSpec::E2Site(j) => {
            if kind != AlgebraKind::Euclidean2 {
                return Err(incompatible());
            }
            let s = rep.site_index(&[*j]).ok_or(StateError::UnknownLabel)?;
            ComplexVector::basis(rep.site_count(), s)
        }
        StateSpec::GlauberCoherent(alpha) => {
            if kind != AlgebraKind::HeisenbergWeyl {
                return Err(incompatible());
            }
            glauber(rep.site_count() - 1, *alpha)?
        }
        StateSpec::SpinCoherent { theta, phi } => {
            if kind != AlgebraKind::Su2 {
                return Err(incompatible());
            }
            if !(0.0..=core::f64::consts::PI).contains(theta) || !phi.is_finite() {
                return Err(StateError::InvalidSpec("theta must lie in [0, pi]"));
            }
            spin_coherent(rep.site_count() - 1, *theta, *phi)
        }
        StateSpec::Su3Coherent(b) => {
            if kind != AlgebraKind::Su3 {
                return Err(incompatible());
            }
            su3_coherent(rep, b)?
        }
        StateSpec::GaussianFsl { center, sigma } => gaussian(rep, center, *sigma)?,
        StateSpec::SqueezedVacuum(beta) => {
            if kind != AlgebraKind::Su11 {
                return Err(incompatible());
            }
            squeezed(rep, *beta)?
        }
    };
    v.normalize();
    Ok(v)
}

fn glauber(n_max: usize, alpha: C64) -> Result<ComplexVector, StateError> {
    let r = alpha.norm();
    if !r.is_finite() {
        return Err(StateError::InvalidSpec("non-finite coherent amplitude"));
    }
    if r == 0.0 {
        return Ok(ComplexVector::basis(n_max + 1, 0));
    }
    let theta = alpha.arg();
    // magnitudes relative to the Poisson peak via |c_{n+1} / c_n| = r / sqrt(n + 1)
    let peak = ((r * r).floor() as usize).min(n_max);
    let mut mag = alloc::vec![0.0f64; n_max + 1];
    mag[peak] = 1.0;
    for n in (0..peak).rev() {
        mag[n] = mag[n + 1] * ((n + 1) as f64).sqrt() / r;
    }
    for n in peak..n_max {
        mag[n + 1] = mag[n] * r / ((n + 1) as f64).sqrt();
    }
    let inside: f64 = mag.iter().map(|m| m * m).sum();
    // continue the recurrence past the truncation to measure the dropped tail
    let mut tail = 0.0;
    let mut m = mag[n_max];
    let mut n = n_max;
    loop {
        m *= r / ((n + 1) as f64).sqrt();
        n += 1;
        tail += m * m;
        if m * m < 1e-40 * inside || n > n_max + 100_000 {
            break;
        }
    }
    let dropped = tail / (inside + tail);
    if dropped > TAIL_TOLERANCE {
        return Err(StateError::TruncationTail { mass: dropped });
    }
    let data = mag.iter().enumerate().map(|(n, &m)| C64::from_polar(m, n as f64 * theta)).collect();
    Ok(ComplexVector::from_vec_unchecked(data))
}

/// Amplitude on the site with `k = S + l`: `sqrt(C(2S, k)) cos^k sin^(2S-k) e^{-i(2S-k) phi}`.
fn spin_coherent_amplitude(two_s: usize, k: usize, theta: f64, phi: f64) -> C64 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let up = k as f64;
    let down = (two_s - k) as f64;
    // 0^0 = 1
    let log_part = |base: f64, e: f64| -> Option<f64> {
        if e == 0.0 {
            Some(0.0)
        } else if base == 0.0 {
            None
        } else {
            Some(e * base.abs().ln())
        }
    };
    let (Some(lc), Some(ls)) = (log_part(c, up), log_part(s, down)) else {
        return C64::new(0.0, 0.0);
    };
    let mut mag = (0.5 * ln_binomial(two_s as u64, k as u64) + lc + ls).exp();
    // signs of cos and sin powers (theta <= pi keeps both non-negative, kept for safety)
    if c < 0.0 && k % 2 == 1 {
        mag = -mag;
    }
    if s < 0.0 && (two_s - k) % 2 == 1 {
        mag = -mag;
    }
    C64::from_polar(mag, -down * phi)
}

fn spin_coherent(two_s: usize, theta: f64, phi: f64) -> ComplexVector {
    let data = (0..=two_s).map(|k| spin_coherent_amplitude(two_s, k, theta, phi)).collect();
    ComplexVector::from_vec_unchecked(data)
}

fn su3_coherent(rep: &AlgebraRep, b: &[C64; 3]) -> Result<ComplexVector, StateError> {
    let norm: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(StateError::InvalidSpec("su(3) coherent amplitudes must satisfy sum |b_i|^2 = 1"));
    }
    let n: i64 = rep.label(0).iter().sum();
    let data = (0..rep.site_count())
        .map(|s| {
            let l = rep.label(s);
            let mut log_mag = 0.5 * ln_factorial(n as u64);
            let mut phase = 0.0;
            for i in 0..3 {
                let k = l[i];
                log_mag -= 0.5 * ln_factorial(k as u64);
                if k > 0 {
                    if b[i].norm() == 0.0 {
                        return C64::new(0.0, 0.0);
                    }
                    log_mag += k as f64 * b[i].norm().ln();
                    phase += k as f64 * b[i].arg();
                }
            }
            C64::from_polar(log_mag.exp(), phase)
        })
        .collect();
    Ok(ComplexVector::from_vec_unchecked(data))
}

fn gaussian(rep: &AlgebraRep, center: &[f64], sigma: f64) -> Result<ComplexVector, StateError> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(StateError::InvalidSpec("Gaussian width must be positive"));
    }
    if center.len() != rep.rank() {
        return Err(StateError::InvalidSpec("Gaussian center needs one value per lattice axis"));
    }
    let n = rep.site_count();
    let coords: Vec<Vec<f64>> = (0..n).map(|s| (0..rep.rank()).map(|a| rep.coordinate(a, s)).collect()).collect();
    // degeneracy of each coordinate tuple
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        coords[x].iter().zip(&coords[y]).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne()).unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut degeneracy = alloc::vec![1usize; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && coords[order[j]] == coords[order[i]] {
            j += 1;
        }
        for &s in &order[i..j] {
            degeneracy[s] = j - i;
        }
        i = j;
    }
    let data = (0..n)
        .map(|s| {
            let d2: f64 = coords[s].iter().zip(center).map(|(c, m)| (c - m) * (c - m)).sum();
            C64::new((-d2 / (2.0 * sigma * sigma)).exp() / (degeneracy[s] as f64).sqrt(), 0.0)
        })
        .collect();
    Ok(ComplexVector::from_vec_unchecked(data))
}

fn squeezed(rep: &AlgebraRep, beta: C64) -> Result<ComplexVector, StateError> {
    let gen = SparseOperator::linear_combination(&[(beta, &rep.root_raise()[0]), (-beta.conj(), &rep.root_lower()[0])])?;
    let e0 = ComplexVector::basis(rep.site_count(), 0);
    let opts = ExpmOptions { max_applications: 50_000, ..ExpmOptions::default() };
    let out = expm_apply_with(&gen, &e0, C64::new(1.0, 0.0), &opts)?.vector;
    let n = rep.site_count();
    let tail: f64 = out[n.saturating_sub(SU11_TAIL_SITES)..].iter().map(|z| z.norm_sqr()).sum();
    if tail > TAIL_TOLERANCE {
        return Err(StateError::TruncationTail { mass: tail });
    }
    Ok(out)
}

/// `<a|b>` with conjugation on `a`.
pub fn overlap(a: &[C64], b: &[C64]) -> Result<C64, StateError> {
    if a.len() != b.len() {
        return Err(NumericsError::DimensionMismatch { expected: a.len(), got: b.len() }.into());
    }
    Ok(crate::numerics::dot(a, b))
}

/// Phase-space distance covered by one displacement of amplitude `beta`.
///
/// `extra` is `S` for su(2) and the Bargmann index `k` for su(1,1); it is
/// ignored otherwise. su(2) uses `|beta|`.
pub fn geodesic_distance(kind: AlgebraKind, beta: C64, extra: f64) -> Result<f64, StateError> {
    let b = beta.norm();
    match kind {
        AlgebraKind::HeisenbergWeyl | AlgebraKind::Euclidean2 => Ok(b),
        AlgebraKind::Su2 => {
            let two_s = (2.0 * extra).round() as i32;
            Ok(b.cos().powi(two_s).clamp(-1.0, 1.0).acos())
        }
        AlgebraKind::Su11 => {
            if b >= 1.0 {
                return Err(StateError::InvalidSpec("su(1,1) distance needs |beta| < 1"));
            }
            Ok((1.0 - b * b).powf(extra).clamp(-1.0, 1.0).acos())
        }
        _ => Err(StateError::Incompatible { spec: "geodesic_distance", kind }),
    }
}

/// `Q(theta, phi) = |<theta, phi|state>|^2` on the given grid.
pub fn husimi_su2(rep: &AlgebraRep, state: &[C64], grid: &[(f64, f64)]) -> Result<Vec<f64>, StateError> {
    if rep.kind() != AlgebraKind::Su2 {
        return Err(StateError::Incompatible { spec: "husimi_su2", kind: rep.kind() });
    }
    if state.len() != rep.site_count() {
        return Err(NumericsError::DimensionMismatch { expected: rep.site_count(), got: state.len() }.into());
    }
    let two_s = rep.site_count() - 1;
    Ok(grid
        .iter()
        .map(|&(theta, phi)| {
            let mut acc = C64::new(0.0, 0.0);
            for (k, psi) in state.iter().enumerate() {
                acc += spin_coherent_amplitude(two_s, k, theta, phi).conj() * psi;
            }
            acc.norm_sqr()
        })
        .collect())
}
