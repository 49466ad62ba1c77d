#[allow(unused_imports)]
use num_traits::Float;

use super::{hermitian_eigenvalues, norm_sqr, DenseMatrix, NumericsError};
use crate::C64;

const STATE_NORM_TOL: f64 = 1e-8;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const NEGATIVE_EIGEN_TOL: f64 = 1e-9;
const ZERO_CLAMP: f64 = 1e-14;

/// Coin density matrix of dimension 2..=8.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixSmall {
    rho: DenseMatrix,
}

impl DensityMatrixSmall {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(rho: DenseMatrix) -> Result<Self, NumericsError> {
        let d = rho.dim();
        if !(2..=8).contains(&d) {
            return Err(NumericsError::UnsupportedDimension(d));
        }
        if rho.max_abs_diff(&rho.adjoint()) > HERMITIAN_TOL {
            return Err(NumericsError::InvalidDensityMatrix { eigenvalue: f64::NAN });
        }
        let trace: f64 = (0..d).map(|i| rho[(i, i)].re).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(NumericsError::InvalidDensityMatrix { eigenvalue: f64::NAN });
        }
        let min = hermitian_eigenvalues(&rho)[0];
        if min < -NEGATIVE_EIGEN_TOL {
            return Err(NumericsError::InvalidDensityMatrix { eigenvalue: min });
        }
        Ok(DensityMatrixSmall { rho })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.rho
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.rho[(i, j)]
    }

    pub fn eigenvalues(&self) -> alloc::vec::Vec<f64> {
        hermitian_eigenvalues(&self.rho)
    }
}

/// Partial trace over the walker of a coin-major state.
pub fn reduced_coin_density(
    state: &[C64],
    site_count: usize,
    coin_dim: usize,
) -> Result<DensityMatrixSmall, NumericsError> {
    if state.len() != site_count * coin_dim {
        return Err(NumericsError::DimensionMismatch { expected: site_count * coin_dim, got: state.len() });
    }
    if !(2..=8).contains(&coin_dim) {
        return Err(NumericsError::UnsupportedDimension(coin_dim));
    }
    let n2 = norm_sqr(state);
    if (n2.sqrt() - 1.0).abs() > STATE_NORM_TOL {
        return Err(NumericsError::NotNormalized { norm: n2.sqrt() });
    }
    let mut rho = DenseMatrix::zeros(coin_dim);
    for a in 0..coin_dim {
        let block_a = &state[a * site_count..(a + 1) * site_count];
        for b in a..coin_dim {
            let block_b = &state[b * site_count..(b + 1) * site_count];
            let mut acc = C64::new(0.0, 0.0);
            for (x, y) in block_a.iter().zip(block_b) {
                acc += x * y.conj();
            }
            rho[(a, b)] = acc / n2;
            rho[(b, a)] = (acc / n2).conj();
        }
        rho[(a, a)].im = 0.0;
    }
    DensityMatrixSmall::new(rho)
}

/// Entropy in bits; eigenvalues below `1e-14` count as zero.
pub fn von_neumann_entropy(rho: &DensityMatrixSmall) -> Result<f64, NumericsError> {
    let mut s = 0.0;
    for lambda in rho.eigenvalues() {
        if lambda < -NEGATIVE_EIGEN_TOL {
            return Err(NumericsError::InvalidDensityMatrix { eigenvalue: lambda });
        }
        if lambda > ZERO_CLAMP {
            s -= lambda * lambda.log2();
        }
    }
    Ok(s.max(0.0))
}
