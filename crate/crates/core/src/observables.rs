//! Lattice distributions, widths, asymmetry, support and coin entanglement.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::AlgebraRep;
use crate::numerics::{compensated_sum, reduced_coin_density, von_neumann_entropy, NumericsError};
use crate::walk::WalkerState;

const NEGATIVE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObservableError {
    #[error("distribution carries no probability")]
    Empty,
    #[error("operation needs a one-dimensional lattice, got rank {0}")]
    NotOneDimensional(usize),
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("probability {0:e} is negative")]
    Negative(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Site probabilities over a representation.
#[derive(Debug, Clone)]
pub struct Distribution<'a> {
    rep: &'a AlgebraRep,
    probabilities: Vec<f64>,
    leakage: f64,
}

impl<'a> Distribution<'a> {
    /// Wraps precomputed site probabilities, such as an ensemble average.
    pub fn from_probabilities(rep: &'a AlgebraRep, probabilities: Vec<f64>, leakage: f64) -> Result<Self, ObservableError> {
        if probabilities.len() != rep.site_count() {
            return Err(ObservableError::Length { expected: rep.site_count(), got: probabilities.len() });
        }
        if let Some(&p) = probabilities.iter().find(|&&p| p < -NEGATIVE_TOL || !p.is_finite()) {
            return Err(ObservableError::Negative(p));
        }
        Ok(Distribution { rep, probabilities, leakage })
    }

    pub fn rep(&self) -> &'a AlgebraRep {
        self.rep
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, site: usize) -> f64 {
        self.probabilities[site]
    }

    /// Largest guard band probability recorded by the walk.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.probabilities.iter().copied())
    }

    /// `sqrt(P)`, the quantity plotted for two-dimensional lattices.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.probabilities.iter().map(|p| p.max(0.0).sqrt()).collect()
    }

    /// Coordinates of `site` on every lattice axis.
    pub fn coordinates(&self, site: usize) -> Vec<f64> {
        (0..self.rep.rank()).map(|a| self.rep.coordinate(a, site)).collect()
    }
}

/// `P(site) = sum_c |psi(c, site)|^2`.
pub fn fsl_distribution<'a>(state: &WalkerState, rep: &'a AlgebraRep) -> Result<Distribution<'a>, ObservableError> {
    if state.site_count() != rep.site_count() {
        return Err(ObservableError::Length { expected: rep.site_count(), got: state.site_count() });
    }
    let n = state.site_count();
    let amps = state.amplitudes();
    let probabilities =
        (0..n).map(|s| compensated_sum((0..state.coin_dim()).map(|c| amps[c * n + s].norm_sqr()))).collect();
    Ok(Distribution { rep, probabilities, leakage: state.leakage() })
}

/// Means and width at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadReport {
    pub step: usize,
    /// Mean on each lattice axis.
    pub mean: Vec<f64>,
    /// Standard deviation for one axis, radial deviation `sqrt(sum Var)`
    /// for two.
    pub sigma: f64,
}

/// Mean and width, normalized by the distribution's total mass.
pub fn spread(dist: &Distribution<'_>, step: usize) -> Result<SpreadReport, ObservableError> {
    let total = dist.total();
    if total <= 0.0 {
        return Err(ObservableError::Empty);
    }
    let rank = dist.rep.rank();
    let mut mean = Vec::with_capacity(rank);
    let mut var = 0.0;
    for a in 0..rank {
        let coord = |s: usize| dist.rep.coordinate(a, s);
        let m = compensated_sum(dist.probabilities.iter().enumerate().map(|(s, p)| p * coord(s))) / total;
        let v = compensated_sum(dist.probabilities.iter().enumerate().map(|(s, p)| {
            let d = coord(s) - m;
            p * d * d
        })) / total;
        mean.push(m);
        var += v.max(0.0);
    }
    Ok(SpreadReport { step, mean, sigma: var.sqrt() })
}

/// `sqrt(sigma^2 - sigma0^2)`, the width gained since the start.
pub fn excess_width(sigma: f64, sigma0: f64) -> f64 {
    (sigma * sigma - sigma0 * sigma0).max(0.0).sqrt()
}

/// Signed mass difference `P(x > center) - P(x < center)` over the total.
///
/// Summing `P(center + l) - P(center - l)` over mirrored bins gives the same
/// value, and it lies in `[-1, 1]`.
pub fn asymmetry(dist: &Distribution<'_>, center: f64) -> Result<f64, ObservableError> {
    let rank = dist.rep.rank();
    if rank != 1 {
        return Err(ObservableError::NotOneDimensional(rank));
    }
    let total = dist.total();
    if total <= 0.0 {
        return Err(ObservableError::Empty);
    }
    let signed = compensated_sum(dist.probabilities.iter().enumerate().map(|(s, p)| {
        let x = dist.rep.coordinate(0, s);
        if x > center {
            *p
        } else if x < center {
            -p
        } else {
            0.0
        }
    }));
    Ok(signed / total)
}

/// Largest distance from the mean among sites with `P > threshold`.
pub fn support_radius(dist: &Distribution<'_>, threshold: f64) -> Result<f64, ObservableError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(ObservableError::InvalidArgument("threshold must lie in (0, 1)"));
    }
    let mean = spread(dist, 0)?.mean;
    let mut radius: f64 = 0.0;
    for (s, &p) in dist.probabilities.iter().enumerate() {
        if p > threshold {
            let r2: f64 = mean.iter().enumerate().map(|(a, m)| (dist.rep.coordinate(a, s) - m).powi(2)).sum();
            radius = radius.max(r2.sqrt());
        }
    }
    Ok(radius)
}

/// Coin-walker entanglement in bits.
pub fn coin_entropy(state: &WalkerState) -> Result<f64, ObservableError> {
    let rho = reduced_coin_density(state.amplitudes(), state.site_count(), state.coin_dim())?;
    Ok(von_neumann_entropy(&rho)?)
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit, ObservableError> {
    if xs.len() != ys.len() {
        return Err(ObservableError::Length { expected: xs.len(), got: ys.len() });
    }
    let n = xs.len();
    if n < 2 {
        return Err(ObservableError::InvalidArgument("a fit needs at least two points"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(ObservableError::InvalidArgument("fit data must be finite"));
    }
    let nf = n as f64;
    let mx = compensated_sum(xs.iter().copied()) / nf;
    let my = compensated_sum(ys.iter().copied()) / nf;
    let sxx = compensated_sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    let sxy = compensated_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let syy = compensated_sum(ys.iter().map(|y| (y - my) * (y - my)));
    if sxx == 0.0 {
        return Err(ObservableError::InvalidArgument("fit abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = compensated_sum(xs.iter().zip(ys).map(|(x, y)| {
        let r = y - (slope * x + intercept);
        r * r
    }));
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LinearFit { slope, intercept, r_squared, points: n })
}

/// Fits `y = C x^p`; the slope of the returned fit is the exponent `p`.
pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit, ObservableError> {
    if xs.iter().chain(ys).any(|&v| v <= 0.0) {
        return Err(ObservableError::InvalidArgument("power-law fit needs positive data"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}

/// Fits `ln y = slope x + c`.
pub fn log_linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit, ObservableError> {
    if ys.iter().any(|&v| v <= 0.0) {
        return Err(ObservableError::InvalidArgument("log-linear fit needs positive data"));
    }
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(xs, &ly)
}
