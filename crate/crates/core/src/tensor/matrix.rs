use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length");
        Self { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex::new(T::lit(rows[i][j]), T::zero()))
    }

    pub fn diagonal(entries: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// `v w†`
    pub fn outer(v: &[Complex<T>], w: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex<T>>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |i, j| columns[j][i])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: T, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }

    /// Largest `|A_ij - conj(A_ji)|`; infinite for non-square input.
    pub fn hermiticity_residual(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| self[(i / r2, j / c2)] * other[(i % r2, j % c2)])
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `v† A v`, real part only (exact for Hermitian `A`).
    pub fn expectation(&self, v: &[Complex<T>]) -> T {
        let av = self.mul_vec(v);
        v.iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Complex::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Replaces the matrix by `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for z in &self.data[i * self.cols..(i + 1) * self.cols] {
                write!(f, " ({:?}, {:?})", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `v† w`
pub fn inner<T: Real>(v: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Kronecker product of two vectors.
pub fn kron_vec<T: Real>(v: &[Complex<T>], w: &[Complex<T>]) -> Vec<Complex<T>> {
    v.iter().flat_map(|&a| w.iter().map(move |&b| a * b)).collect()
}
