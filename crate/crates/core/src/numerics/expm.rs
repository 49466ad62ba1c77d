use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{
    axpy, dot, expm_dense, norm_sqr, scale_in_place, symmetric_tridiagonal_eigen_rows, ComplexVector, DenseMatrix, NumericsError,
    SparseOperator,
};
use crate::C64;

/// Controls for [`expm_apply_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpmOptions {
    /// Total generator applications allowed per call.
    pub max_applications: usize,
    /// Local error target relative to `||v||`.
    pub tol: f64,
    /// Maximum Krylov subspace dimension per substep.
    pub krylov_dim: usize,
}

impl Default for ExpmOptions {
    fn default() -> Self {
        ExpmOptions { max_applications: 500, tol: 1e-13, krylov_dim: 30 }
    }
}

/// Result and diagnostics of one exponential action.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpmOutcome {
    pub vector: ComplexVector,
    pub applications: usize,
    pub substeps: usize,
    /// Sum of the accepted local error estimates, relative to `||v||`.
    pub error_estimate: f64,
}

/// `exp(scale * gen) v` with default options.
pub fn expm_apply(gen: &SparseOperator, v: &[C64], scale: C64) -> Result<ComplexVector, NumericsError> {
    expm_apply_with(gen, v, scale, &ExpmOptions::default()).map(|o| o.vector)
}

/// `exp(scale * gen) v` by adaptive Krylov substeps.
///
/// Uses the three-term Lanczos recurrence when `scale * gen` is
/// anti-Hermitian and full Arnoldi with modified Gram-Schmidt otherwise.
pub fn expm_apply_with(
    gen: &SparseOperator,
    v: &[C64],
    scale: C64,
    opts: &ExpmOptions,
) -> Result<ExpmOutcome, NumericsError> {
    if !gen.is_square() {
        return Err(NumericsError::NotSquare { rows: gen.rows(), cols: gen.cols() });
    }
    if v.len() != gen.cols() {
        return Err(NumericsError::DimensionMismatch { expected: gen.cols(), got: v.len() });
    }
    if !scale.re.is_finite() || !scale.im.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let beta0 = norm_sqr(v).sqrt();
    if beta0 == 0.0 || scale == C64::new(0.0, 0.0) || gen.nnz() == 0 {
        return Ok(ExpmOutcome {
            vector: ComplexVector::from_vec(v.to_vec())?,
            applications: 0,
            substeps: 0,
            error_estimate: 0.0,
        });
    }

    let lanczos = gen.is_anti_hermitian() && scale.im == 0.0;
    let n = v.len();
    let kmax = opts.krylov_dim.clamp(2, n.max(2));
    let mut basis: Vec<Vec<C64>> = (0..=kmax).map(|_| alloc::vec![C64::new(0.0, 0.0); n]).collect();
    let mut w = v.to_vec();
    let mut t = 0.0f64;
    let mut tau = 1.0f64;
    let mut applications = 0usize;
    let mut substeps = 0usize;
    let mut error_total = 0.0f64;

    while t < 1.0 {
        tau = tau.min(1.0 - t);
        let beta = norm_sqr(&w).sqrt();
        basis[0].copy_from_slice(&w);
        scale_in_place(&mut basis[0], 1.0 / beta);

        let mut h = alloc::vec![C64::new(0.0, 0.0); (kmax + 1) * kmax];
        let hidx = |i: usize, j: usize| i * kmax + j;
        let mut k_used = kmax;
        let mut happy = false;
        let mut accepted: Option<f64> = None;
        let mut hnorm_scale = 0.0f64;

        for j in 0..kmax {
            if applications >= opts.max_applications {
                return Err(NumericsError::NonConvergence { applications, residual: 1.0 - t });
            }
            let (head, tail) = basis.split_at_mut(j + 1);
            let p = &mut tail[0];
            gen.apply_into(&head[j], p);
            scale_in_place_c(p, scale);
            applications += 1;

            let hn = if lanczos {
                let hjj = dot(&head[j], p);
                h[hidx(j, j)] = hjj;
                if j > 0 {
                    let hprev = h[hidx(j - 1, j)];
                    lanczos_update(p, hjj, &head[j], hprev, &head[j - 1])
                } else {
                    lanczos_update(p, hjj, &head[j], C64::new(0.0, 0.0), &head[j])
                }
            } else {
                for (i, vi) in head.iter().enumerate() {
                    let hij = dot(vi, p);
                    axpy(-hij, vi, p);
                    h[hidx(i, j)] = hij;
                }
                norm_sqr(p).sqrt()
            };
            hnorm_scale = hnorm_scale.max(hn).max(h[hidx(j, j)].norm());
            if hn <= 1e-14 * hnorm_scale.max(1e-300) {
                k_used = j + 1;
                happy = true;
                break;
            }
            h[hidx(j + 1, j)] = C64::new(hn, 0.0);
            if lanczos && j + 1 < kmax {
                h[hidx(j, j + 1)] = C64::new(-hn, 0.0);
            }
            scale_in_place(p, 1.0 / hn);

            let k = j + 1;
            if k == kmax || k % 4 == 0 || k == 2 {
                let err = hn * tau * ProjectedExp::new(&h, kmax, k, lanczos, false)?.last_entry(tau).norm();
                if err <= opts.tol * tau || k == kmax {
                    k_used = k;
                    accepted = Some(err);
                    if err <= opts.tol * tau {
                        break;
                    }
                }
            }
        }

        let (f, err) = if happy {
            tau = 1.0 - t;
            (ProjectedExp::new(&h, kmax, k_used, lanczos, true)?.first_column(tau), 0.0)
        } else {
            let mut err = accepted.expect("an estimate is always made at kmax");
            let hn = h[hidx(k_used, k_used - 1)].re;
            let projected = ProjectedExp::new(&h, kmax, k_used, lanczos, true)?;
            // shrink the substep on the existing basis until the estimate passes
            let mut shrinks = 0;
            while err > opts.tol * tau {
                let factor = (0.9 * (opts.tol * tau / err).powf(1.0 / k_used as f64)).clamp(0.05, 0.5);
                tau *= factor;
                err = hn * tau * projected.last_entry(tau).norm();
                shrinks += 1;
                if shrinks > 200 || !err.is_finite() {
                    return Err(NumericsError::NonConvergence { applications, residual: err });
                }
            }
            (projected.first_column(tau), err)
        };

        for z in w.iter_mut() {
            *z = C64::new(0.0, 0.0);
        }
        for (i, fi) in f.iter().enumerate().take(k_used) {
            axpy(fi * beta, &basis[i], &mut w);
        }
        t += tau;
        substeps += 1;
        error_total += err;
        if !happy {
            let grow = if err > 0.0 {
                (0.9 * (opts.tol * tau / err).powf(1.0 / k_used as f64)).clamp(0.2, 2.0)
            } else {
                2.0
            };
            tau *= grow;
        }
        if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
    }

    Ok(ExpmOutcome {
        vector: ComplexVector::from_vec_unchecked(w),
        applications,
        substeps,
        error_estimate: error_total,
    })
}

/// `p -= a x + b y` in one pass, returning the new `||p||`.
fn lanczos_update(p: &mut [C64], a: C64, x: &[C64], b: C64, y: &[C64]) -> f64 {
    let mut acc = 0.0;
    for ((pi, xi), yi) in p.iter_mut().zip(x).zip(y) {
        *pi -= a * xi + b * yi;
        acc += pi.norm_sqr();
    }
    acc.sqrt()
}

fn scale_in_place_c(v: &mut [C64], s: C64) {
    if s == C64::new(1.0, 0.0) {
        return;
    }
    for z in v.iter_mut() {
        *z *= s;
    }
}

/// `tau -> exp(tau H_k) e_0` for the leading `k x k` block of the projected
/// matrix.
enum ProjectedExp {
    /// Lanczos: `H = -i P M P^dagger` with `M` real symmetric tridiagonal and
    /// `P = diag(i^j)`, so one eigen-decomposition serves every `tau`. `z`
    /// holds eigenvector rows `0` and `k - 1` only, or all `k` rows.
    Tridiagonal { k: usize, full: bool, lambda: Vec<f64>, z: Vec<f64> },
    Dense(DenseMatrix),
}

/// `i^r`
fn i_power(r: usize) -> C64 {
    [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][r % 4]
}

impl ProjectedExp {
    fn new(h: &[C64], kmax: usize, k: usize, lanczos: bool, full: bool) -> Result<Self, NumericsError> {
        if lanczos {
            let d: Vec<f64> = (0..k).map(|j| -h[j * kmax + j].im).collect();
            let e: Vec<f64> = (0..k.saturating_sub(1)).map(|j| h[(j + 1) * kmax + j].re).collect();
            let rows: Vec<usize> = if full { (0..k).collect() } else { alloc::vec![0, k - 1] };
            let (lambda, z) = symmetric_tridiagonal_eigen_rows(&d, &e, &rows)?;
            return Ok(ProjectedExp::Tridiagonal { k, full, lambda, z });
        }
        let mut m = DenseMatrix::zeros(k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = h[i * kmax + j];
            }
        }
        Ok(ProjectedExp::Dense(m))
    }

    /// Component `row` (an index into the tracked rows) of the Lanczos case.
    fn tridiagonal_entry(k: usize, lambda: &[f64], z: &[f64], tracked: usize, row: usize, tau: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..k {
            acc += C64::from_polar(z[j] * z[tracked * k + j], -tau * lambda[j]);
        }
        acc * i_power(row)
    }

    fn last_entry(&self, tau: f64) -> C64 {
        match self {
            ProjectedExp::Tridiagonal { k, full, lambda, z } => {
                let tracked = if *full { k - 1 } else { 1 };
                Self::tridiagonal_entry(*k, lambda, z, tracked, k - 1, tau)
            }
            ProjectedExp::Dense(_) => *self.first_column(tau).last().expect("k >= 1"),
        }
    }

    fn first_column(&self, tau: f64) -> Vec<C64> {
        match self {
            ProjectedExp::Tridiagonal { k, full, lambda, z } => {
                debug_assert!(*full);
                (0..*k).map(|r| Self::tridiagonal_entry(*k, lambda, z, r, r, tau)).collect()
            }
            ProjectedExp::Dense(m) => {
                let e = expm_dense(&m.scaled(C64::new(tau, 0.0)));
                (0..m.dim()).map(|i| e[(i, 0)]).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Anti-Hermitian tridiagonal with hopping `sqrt(i+1)` (a displacement generator).
    fn ladder(n: usize) -> SparseOperator {
        let mut t = Vec::new();
        for i in 0..n - 1 {
            let a = ((i + 1) as f64).sqrt();
            t.push((i + 1, i, c(a, 0.0)));
            t.push((i, i + 1, c(-a, 0.0)));
        }
        SparseOperator::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn zero_scale_is_identity() {
        let v = vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.0, 0.7)];
        let out = expm_apply(&ladder(3), &v, c(0.0, 0.0)).unwrap();
        assert_eq!(out.as_slice(), &v[..]);
    }

    #[test]
    fn two_by_two_rotation() {
        let b = core::f64::consts::FRAC_PI_4;
        let g = SparseOperator::from_triplets(2, 2, &[(0, 1, c(b, 0.0)), (1, 0, c(-b, 0.0))]).unwrap();
        let out = expm_apply(&g, &[c(1.0, 0.0), c(0.0, 0.0)], c(1.0, 0.0)).unwrap();
        assert!((out[0] - c(b.cos(), 0.0)).norm() < 1e-14);
        assert!((out[1] - c(-b.sin(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn coherent_displacement_from_vacuum() {
        // exp(b (a^dag - a)) |0> is Poissonian with mean b^2
        let g = ladder(120);
        let mut v = vec![c(0.0, 0.0); 120];
        v[0] = c(1.0, 0.0);
        let b = 3.0;
        let out = expm_apply(&g, &v, c(b, 0.0)).unwrap();
        let mut expected = (-b * b / 2.0f64).exp();
        for n in 0..60 {
            assert!((out[n].re - expected).abs() < 1e-12, "n={n}");
            expected *= b / ((n + 1) as f64).sqrt();
        }
    }

    #[test]
    fn budget_exhaustion_reports_nonconvergence() {
        let g = ladder(400);
        let v: Vec<C64> = (0..400).map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let opts = ExpmOptions { max_applications: 5, ..ExpmOptions::default() };
        let r = expm_apply_with(&g, &v, c(5.0, 0.0), &opts);
        assert!(matches!(r, Err(NumericsError::NonConvergence { applications: 5, .. })));
    }

    #[test]
    fn non_square_is_rejected() {
        let g = SparseOperator::zero(2, 3);
        assert!(matches!(
            expm_apply(&g, &[c(1.0, 0.0); 3], c(1.0, 0.0)),
            Err(NumericsError::NotSquare { .. })
        ));
    }

    #[test]
    fn non_normal_generator_uses_arnoldi() {
        // nilpotent Jordan block: exp(N) e_0 = (1, 1, 1/2, 1/6, ...)
        let t: Vec<_> = (0..5).map(|i| (i + 1, i, c(1.0, 0.0))).collect();
        let g = SparseOperator::from_triplets(6, 6, &t).unwrap();
        let mut v = vec![c(0.0, 0.0); 6];
        v[0] = c(1.0, 0.0);
        let out = expm_apply(&g, &v, c(1.0, 0.0)).unwrap();
        let mut fact = 1.0;
        for (k, z) in out.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((z.re - 1.0 / fact).abs() < 1e-14);
        }
    }
}
