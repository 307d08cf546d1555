//! Cyclic Jacobi diagonalization of dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `A[p][q]` with a
//! diagonal unitary and then applies a real Givens rotation, so the whole
//! sweep stays unitary and the eigenvector matrix is accumulated exactly.
//! Sizes in this crate never exceed 64x64, where Jacobi is both fast enough
//! and accurate to a few ulps relative to the spectral norm.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Hermiticity tolerance applied before diagonalizing.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    /// Eigenvalues in descending order.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: CMatrix<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn max(&self) -> T {
        self.values[0]
    }

    pub fn min(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }

    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.column(k)
    }

    /// `V diag(values) V†`
    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * self.values[j]);
        &scaled * &self.vectors.adjoint()
    }
}

fn check_hermitian<T: Real>(h: &CMatrix<T>) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Shape(format!("expected a square matrix, got {}x{}", h.rows(), h.cols())));
    }
    let scale = T::one().max(h.max_abs());
    let residual = h.hermiticity_residual();
    if residual > T::tol(HERMITIAN_TOL) * scale {
        return Err(Error::NotHermitian(residual.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_spectrum<T: Real>(h: &CMatrix<T>) -> Result<Spectrum<T>> {
    check_hermitian(h)?;
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = CMatrix::<T>::identity(n);
    let norm = a.frobenius_norm();
    if n <= 1 || norm.is_zero() {
        return Ok(sorted(a, v));
    }
    let target = T::epsilon() * norm;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target * T::lit(16.0) {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }
    Ok(sorted(a, v))
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues<T: Real>(h: &CMatrix<T>) -> Result<Vec<T>> {
    hermitian_spectrum(h).map(|s| s.values)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Real>(h: &CMatrix<T>) -> Result<T> {
    hermitian_spectrum(h).map(|s| s.min())
}

fn off_diagonal_norm<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= T::min_positive_value() {
        return;
    }
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // A[p][q] = r e^{i theta}; `phase` = e^{-i theta}
    let phase = apq.conj() / r;
    let tau = (aqq - app) / (r + r);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // G = [[c, s], [-s e^{-i theta}, c e^{-i theta}]] on the (p, q) plane.
    let g_qp = -phase * s;
    let g_qq = phase * c;

    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * g_qp;
        a[(k, q)] = akp * s + akq * g_qq;
    }
    // A <- G† A
    let (g_qp_c, g_qq_c) = (g_qp.conj(), g_qq.conj());
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * g_qp_c;
        a[(q, k)] = apk * s + aqk * g_qq_c;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    // V <- V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * g_qp;
        v[(k, q)] = vkp * s + vkq * g_qq;
    }
}

fn sorted<T: Real>(a: CMatrix<T>, v: CMatrix<T>) -> Spectrum<T> {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Spectrum { values, vectors }
}
