use alloc::vec::Vec;

use super::{ComplexVector, NumericsError};
use crate::C64;

/// Compressed-sparse-row complex operator.
///
/// Column indices within a row are strictly increasing, so duplicate
/// coordinates cannot be represented.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
    anti_hermitian: bool,
}

impl SparseOperator {
    /// Builds from `(row, col, value)` triplets in any order, keeping every
    /// provided entry.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, C64)],
    ) -> Result<Self, NumericsError> {
        Self::from_triplets_with_drop(rows, cols, triplets, 0.0)
    }

    /// Like [`from_triplets`](Self::from_triplets) but discards entries with
    /// `|value| <= drop_tol` when `drop_tol > 0`.
    pub fn from_triplets_with_drop(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, C64)],
        drop_tol: f64,
    ) -> Result<Self, NumericsError> {
        let mut entries: Vec<(usize, usize, C64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(NumericsError::EntryOutOfRange { row: r, col: c, rows, cols });
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(NumericsError::NonFinite);
            }
            if drop_tol > 0.0 && v.norm() <= drop_tol {
                continue;
            }
            entries.push((r, c, v));
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(NumericsError::DuplicateEntry { row: w[0].0, col: w[0].1 });
            }
        }
        let mut row_ptr = alloc::vec![0usize; rows + 1];
        for &(r, _, _) in &entries {
            row_ptr[r + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = entries.iter().map(|e| e.1).collect();
        let values = entries.iter().map(|e| e.2).collect();
        let mut op = SparseOperator { rows, cols, row_ptr, col_idx, values, anti_hermitian: false };
        op.anti_hermitian = op.check_anti_hermitian();
        Ok(op)
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect();
        Self::from_triplets(n, n, &t).expect("identity is well formed")
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::from_triplets(rows, cols, &[]).expect("empty operator is well formed")
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let t: Vec<_> = diag.iter().enumerate().map(|(i, &d)| (i, i, C64::new(d, 0.0))).collect();
        Self::from_triplets(diag.len(), diag.len(), &t).expect("diagonal is well formed")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `A = -A^dagger` holds entry for entry (bitwise up to sign).
    pub fn is_anti_hermitian(&self) -> bool {
        self.anti_hermitian
    }

    /// Iterates stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    /// Stored entries of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.col_idx[k], self.values[k]))
    }

    /// Entry lookup; absent entries read as zero.
    pub fn get(&self, r: usize, c: usize) -> C64 {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        match self.col_idx[lo..hi].binary_search(&c) {
            Ok(k) => self.values[lo + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn adjoint(&self) -> Self {
        let t: Vec<_> = self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.cols, self.rows, &t).expect("adjoint of a valid operator")
    }

    /// `sum_k coeff_k * op_k` over operators of equal shape.
    pub fn linear_combination(terms: &[(C64, &SparseOperator)]) -> Result<Self, NumericsError> {
        let Some(&(_, first)) = terms.first() else {
            return Err(NumericsError::DimensionMismatch { expected: 1, got: 0 });
        };
        let (rows, cols) = (first.rows, first.cols);
        let mut entries: Vec<(usize, usize, C64)> = Vec::new();
        for &(coeff, op) in terms {
            if op.rows != rows || op.cols != cols {
                return Err(NumericsError::DimensionMismatch { expected: rows, got: op.rows });
            }
            entries.extend(op.triplets().map(|(r, c, v)| (r, c, coeff * v)));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        Self::from_triplets(rows, cols, &merged)
    }

    /// Sparse mat-vec.
    pub fn apply(&self, v: &[C64]) -> Result<ComplexVector, NumericsError> {
        if v.len() != self.cols {
            return Err(NumericsError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let mut out = alloc::vec![C64::new(0.0, 0.0); self.rows];
        self.apply_into(v, &mut out);
        Ok(ComplexVector::from_vec_unchecked(out))
    }

    /// `out = A v` without allocation. Lengths must match the shape.
    pub(crate) fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * v[self.col_idx[k]];
            }
            *o = acc;
        }
    }

    /// Sparse product `self * rhs`.
    pub fn matmul(&self, rhs: &SparseOperator) -> Result<Self, NumericsError> {
        if self.cols != rhs.rows {
            return Err(NumericsError::DimensionMismatch { expected: self.cols, got: rhs.rows });
        }
        let mut entries = Vec::new();
        let mut acc: Vec<C64> = alloc::vec![C64::new(0.0, 0.0); rhs.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = alloc::vec![false; rhs.cols];
        for r in 0..self.rows {
            for (k, a) in self.row(r) {
                for (c, b) in rhs.row(k) {
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                entries.push((r, c, acc[c]));
                acc[c] = C64::new(0.0, 0.0);
                mark[c] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.rows, rhs.cols, &entries)
    }

    /// Largest absolute row sum (the induced infinity norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn check_anti_hermitian(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        self.triplets().all(|(r, c, v)| {
            let t = self.get(c, r);
            t.re == -v.re && t.im == v.im
        })
    }
}
