//! Complex sparse linear algebra used by every walk.
//!
//! Everything here is single-threaded and evaluates reductions in index
//! order, so results are bitwise reproducible for fixed inputs.

mod dense;
mod density;
mod expm;
mod sparse;

use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

pub use dense::{expm_dense, hermitian_eigenvalues, symmetric_tridiagonal_eigen, symmetric_tridiagonal_eigen_rows, DenseMatrix};
pub use density::{reduced_coin_density, von_neumann_entropy, DensityMatrixSmall};
pub use expm::{expm_apply, expm_apply_with, ExpmOptions, ExpmOutcome};
pub use sparse::SparseOperator;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator is {rows}x{cols}, a square operator is required")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry ({row}, {col}) is outside a {rows}x{cols} operator")]
    EntryOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("exponential did not converge within {applications} generator applications (residual {residual:e})")]
    NonConvergence { applications: usize, residual: f64 },
    #[error("state norm {norm} deviates from 1 beyond tolerance")]
    NotNormalized { norm: f64 },
    #[error("invalid density matrix: eigenvalue {eigenvalue:e}")]
    InvalidDensityMatrix { eigenvalue: f64 },
    #[error("density matrix dimension {0} outside the supported range 2..=8")]
    UnsupportedDimension(usize),
}

/// Amplitude vector with finite entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexVector(Vec<C64>);

impl ComplexVector {
    pub fn zeros(len: usize) -> Self {
        ComplexVector(alloc::vec![C64::new(0.0, 0.0); len])
    }

    /// Unit vector `e_index`.
    pub fn basis(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = C64::new(1.0, 0.0);
        v
    }

    /// Wraps `data`, rejecting NaN or infinite entries.
    pub fn from_vec(data: Vec<C64>) -> Result<Self, NumericsError> {
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
        Ok(ComplexVector(data))
    }

    /// Wraps `data` without the finiteness scan.
    pub(crate) fn from_vec_unchecked(data: Vec<C64>) -> Self {
        ComplexVector(data)
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm; a zero vector is left untouched.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            scale_in_place(&mut self.0, 1.0 / n);
        }
    }

    /// `<self|other>` with conjugation on `self`.
    pub fn dot(&self, other: &ComplexVector) -> Result<C64, NumericsError> {
        if self.len() != other.len() {
            return Err(NumericsError::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        Ok(dot(&self.0, &other.0))
    }
}

impl Deref for ComplexVector {
    type Target = [C64];
    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl DerefMut for ComplexVector {
    fn deref_mut(&mut self) -> &mut [C64] {
        &mut self.0
    }
}

impl From<ComplexVector> for Vec<C64> {
    fn from(v: ComplexVector) -> Vec<C64> {
        v.0
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Squared Euclidean norm with compensated accumulation.
pub fn norm_sqr(v: &[C64]) -> f64 {
    compensated_sum(v.iter().map(|z| z.norm_sqr()))
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

/// `ln(n!)`, exact product below 21 and a Stirling series above.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 20 {
        let mut p: u64 = 1;
        for k in 2..=n {
            p *= k;
        }
        return (p as f64).ln();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    x * x.ln() - x + 0.5 * (2.0 * core::f64::consts::PI * x).ln() + series
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

pub(crate) fn scale_in_place(v: &mut [C64], s: f64) {
    for z in v.iter_mut() {
        *z *= s;
    }
}

/// `y += a * x`
pub(crate) fn axpy(a: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let v = alloc::vec![C64::new(1.0, 0.0), C64::new(f64::NAN, 0.0)];
        assert_eq!(ComplexVector::from_vec(v), Err(NumericsError::NonFinite));
    }

    #[test]
    fn compensated_norm_is_precise() {
        // one large entry plus many tiny ones that a naive sum would drop
        let mut data = alloc::vec![C64::new(1.0, 0.0)];
        data.extend(core::iter::repeat(C64::new(1e-9, 0.0)).take(10_000));
        let v = ComplexVector::from_vec(data).unwrap();
        let expected = 1.0 + 10_000.0 * 1e-18;
        assert!(((v.norm_sqr() - expected) / expected).abs() < 1e-15);
    }

    #[test]
    fn ln_factorial_is_continuous_across_the_switch() {
        // direct log-sum reference
        let direct = |n: u64| (2..=n).map(|k| (k as f64).ln()).sum::<f64>();
        for n in [0, 1, 5, 20, 21, 22, 50, 170] {
            assert!((ln_factorial(n) - direct(n)).abs() < 1e-12 * direct(n).max(1.0), "n={n}");
        }
        assert!((ln_binomial(10, 3) - 120f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn dot_conjugates_left() {
        let a = ComplexVector::from_vec(alloc::vec![C64::new(0.0, 1.0)]).unwrap();
        let b = ComplexVector::from_vec(alloc::vec![C64::new(0.0, 1.0)]).unwrap();
        assert_eq!(a.dot(&b).unwrap(), C64::new(1.0, 0.0));
    }
}
