use num_complex::Complex;
use num_traits::{One, Zero};

use super::eigen::hermitian_spectrum;
use super::matrix::{norm, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Normalization tolerance for pure states.
pub const NORM_TOL: f64 = 1e-12;
/// Trace and Hermiticity tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted in a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Unitarity tolerance, `max |U†U - 1|`.
pub const UNITARY_TOL: f64 = 1e-10;

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// One of the two parties of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Normalized vector in C^d ⊗ C^d, index `j * d + jb` for `|j, jb⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    d: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    pub fn new(d: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_dim(d)?;
        if amplitudes.len() != d * d {
            return Err(Error::Shape(format!("expected {} amplitudes, got {}", d * d, amplitudes.len())));
        }
        let n = norm(&amplitudes);
        if (n * n - T::one()).abs() > T::tol(NORM_TOL) {
            return Err(Error::Domain(format!("state norm squared {} is not 1", n * n)));
        }
        Ok(Self { d, amplitudes })
    }

    /// Normalizes the amplitudes first.
    pub fn normalized(d: usize, mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n.is_zero() || !n.is_finite() {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        for z in &mut amplitudes {
            *z = *z / n;
        }
        Self::new(d, amplitudes)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    #[inline]
    pub fn amplitude(&self, j: usize, jb: usize) -> Complex<T> {
        self.amplitudes[j * self.d + jb]
    }

    /// The d x d coefficient matrix `alpha[j][jb]`.
    pub fn coefficient_matrix(&self) -> CMatrix<T> {
        CMatrix::from_row_major(self.d, self.d, self.amplitudes.clone())
    }

    pub fn projector(&self) -> DensityMatrix<T> {
        DensityMatrix { d: self.d, matrix: CMatrix::outer(&self.amplitudes, &self.amplitudes) }
    }

    /// Multiplies by a global phase so the largest-modulus amplitude is real
    /// and positive. The first maximal index wins ties.
    pub fn with_canonical_phase(mut self) -> Self {
        let mut best = 0;
        for (i, z) in self.amplitudes.iter().enumerate() {
            if z.norm() > self.amplitudes[best].norm() * (T::one() + T::tol(1e-12)) {
                best = i;
            }
        }
        let z = self.amplitudes[best];
        if z.norm() > T::zero() {
            let phase = z.conj() / z.norm();
            for a in &mut self.amplitudes {
                *a = *a * phase;
            }
        }
        self
    }
}

/// Hermitian, positive semidefinite, unit-trace d² x d² matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    d: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(d: usize, matrix: CMatrix<T>) -> Result<Self> {
        check_dim(d)?;
        if matrix.rows() != d * d || matrix.cols() != d * d {
            return Err(Error::Shape(format!(
                "density matrix for d = {d} must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols(),
                n = d * d
            )));
        }
        let herm = matrix.hermiticity_residual();
        if herm > T::tol(DENSITY_TOL) {
            return Err(Error::NotHermitian(herm.to_f64().unwrap_or(f64::NAN)));
        }
        let tr = matrix.trace().re;
        if (tr - T::one()).abs() > T::tol(DENSITY_TOL) {
            return Err(Error::Domain(format!("trace {tr} is not 1")));
        }
        let min = hermitian_spectrum(&matrix)?.min();
        if min < -T::tol(PSD_TOL) {
            return Err(Error::Domain(format!("negative eigenvalue {min}")));
        }
        Ok(Self { d, matrix })
    }

    /// `identity / d²`
    pub fn maximally_mixed(d: usize) -> Result<Self> {
        check_dim(d)?;
        let n = d * d;
        Ok(Self { d, matrix: CMatrix::identity(n).scale(T::one() / T::from_usize_lossy(n)) })
    }

    /// `weight * a + (1 - weight) * b`; `weight` must lie in [0, 1].
    pub fn mixture(weight: T, a: &Self, b: &Self) -> Result<Self> {
        if a.d != b.d {
            return Err(Error::Shape(format!("cannot mix d = {} with d = {}", a.d, b.d)));
        }
        if !(weight >= T::zero() && weight <= T::one()) {
            return Err(Error::Domain(format!("mixing weight {weight} outside [0, 1]")));
        }
        let mut m = a.matrix.scale(weight);
        m.add_scaled(T::one() - weight, &b.matrix);
        Ok(Self { d: a.d, matrix: m })
    }

    /// Product state `sigma_a ⊗ sigma_b` of two d x d density operators.
    pub fn product(sigma_a: &CMatrix<T>, sigma_b: &CMatrix<T>) -> Result<Self> {
        if sigma_a.rows() != sigma_b.rows() {
            return Err(Error::Shape("marginals of different dimension".into()));
        }
        Self::new(sigma_a.rows(), sigma_a.kron(sigma_b))
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_parts_unchecked(d: usize, matrix: CMatrix<T>) -> Self {
        Self { d, matrix }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    /// `tr(op · rho)`, real part.
    pub fn expectation(&self, op: &CMatrix<T>) -> T {
        op.trace_product(&self.matrix).re
    }

    /// Expresses the state in the product basis given by the columns of
    /// `basis_a ⊗ basis_b`, i.e. returns `(Ua ⊗ Ub)† rho (Ua ⊗ Ub)`.
    pub fn in_local_basis(&self, basis_a: &CMatrix<T>, basis_b: &CMatrix<T>) -> Self {
        let u = basis_a.kron(basis_b);
        let m = &(&u.adjoint() * &self.matrix) * &u;
        Self { d: self.d, matrix: m.hermitian_part() }
    }
}

/// Square matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> UnitaryMatrix<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!("unitary must be square, got {}x{}", matrix.rows(), matrix.cols())));
        }
        let dev = (&matrix.adjoint() * &matrix).max_abs_diff(&CMatrix::identity(matrix.rows()));
        if dev > T::tol(UNITARY_TOL) {
            return Err(Error::NotUnitary(dev.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: CMatrix::identity(d) }
    }

    /// Diagonal unitary `diag(e^{i phases[j]})`.
    pub fn phases(phases: &[T]) -> Self {
        let diag: Vec<_> = phases.iter().map(|&p| Complex::from_polar(T::one(), p)).collect();
        Self { matrix: CMatrix::diagonal(&diag) }
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix<T>) -> Self {
        Self { matrix }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn column(&self, k: usize) -> Vec<Complex<T>> {
        self.matrix.column(k)
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix * &other.matrix }
    }
}

/// `|Ψ⟩ = Σ_j |jj⟩ / √d`
pub fn max_entangled<T: Real>(d: usize) -> Result<PureState<T>> {
    check_dim(d)?;
    let a = T::one() / T::from_usize_lossy(d).sqrt();
    let mut amps = vec![Complex::zero(); d * d];
    for j in 0..d {
        amps[j * d + j] = Complex::new(a, T::zero());
    }
    PureState::new(d, amps)
}

/// `Σ c_i |ii⟩ / ‖c‖` for nonnegative Schmidt coefficients.
pub fn schmidt_state<T: Real>(coeffs: &[T]) -> Result<PureState<T>> {
    let d = coeffs.len();
    check_dim(d)?;
    if let Some(c) = coeffs.iter().find(|c| !(**c >= T::zero()) || !c.is_finite()) {
        return Err(Error::Domain(format!("Schmidt coefficient {c} is not a finite nonnegative number")));
    }
    let mut amps = vec![Complex::zero(); d * d];
    for (i, &c) in coeffs.iter().enumerate() {
        amps[i * d + i] = Complex::new(c, T::zero());
    }
    PureState::normalized(d, amps).map_err(|_| Error::Domain("all Schmidt coefficients are zero".into()))
}

/// Reduced d x d operator of a bipartite d² x d² matrix.
pub fn partial_trace_matrix<T: Real>(x: &CMatrix<T>, d: usize, traced: Subsystem) -> Result<CMatrix<T>> {
    if x.rows() != d * d || x.cols() != d * d {
        return Err(Error::Shape(format!("expected {n}x{n}, got {}x{}", x.rows(), x.cols(), n = d * d)));
    }
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex::zero();
            for k in 0..d {
                acc += match traced {
                    Subsystem::B => x[(i * d + k, j * d + k)],
                    Subsystem::A => x[(k * d + i, k * d + j)],
                };
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Traces out `traced`, returning the marginal of the other party.
pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, traced: Subsystem) -> CMatrix<T> {
    partial_trace_matrix(rho.matrix(), rho.dim(), traced).expect("density matrix has d² x d² shape")
}

/// Infers the local dimension of a d² x d² matrix.
pub fn local_dim_of<T: Real>(x: &CMatrix<T>) -> Result<usize> {
    let n = x.rows();
    let d = (n as f64).sqrt().round() as usize;
    if !x.is_square() || d * d != n || d < 1 {
        return Err(Error::Shape(format!("{}x{} is not a square d² x d² matrix", x.rows(), x.cols())));
    }
    Ok(d)
}

/// Partial transpose on one tensor factor.
pub fn partial_transpose<T: Real>(x: &CMatrix<T>, on: Subsystem) -> Result<CMatrix<T>> {
    let d = local_dim_of(x)?;
    Ok(CMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (c / d, c % d);
        match on {
            Subsystem::A => x[(j * d + k, i * d + l)],
            Subsystem::B => x[(i * d + l, j * d + k)],
        }
    }))
}

/// `SWAP = Σ |jk⟩⟨kj|`
pub fn swap_operator<T: Real>(d: usize) -> CMatrix<T> {
    let mut s = CMatrix::zeros(d * d, d * d);
    for j in 0..d {
        for k in 0..d {
            s[(j * d + k, k * d + j)] = Complex::one();
        }
    }
    s
}

/// Discrete Fourier matrix with entries `e^{+2πi jk/d} / √d`.
pub fn fourier_matrix<T: Real>(d: usize) -> Result<UnitaryMatrix<T>> {
    check_dim(d)?;
    let scale = T::one() / T::from_usize_lossy(d).sqrt();
    let dt = T::from_usize_lossy(d);
    let m = CMatrix::from_fn(d, d, |j, k| {
        // reduce jk mod d before scaling to keep the angle small
        let angle = T::TAU() * T::from_usize_lossy((j * k) % d) / dt;
        Complex::from_polar(scale, angle)
    });
    Ok(UnitaryMatrix::from_matrix_unchecked(m))
}

/// Schmidt decomposition `|φ⟩ = Σ_i s_i |a_i⟩|b_i⟩`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition<T> {
    /// Schmidt coefficients, descending.
    pub coefficients: Vec<T>,
    /// Columns `a_i`.
    pub basis_a: CMatrix<T>,
    /// Columns `b_i`; columns with zero coefficient complete the basis.
    pub basis_b: CMatrix<T>,
}

impl<T: Real> SchmidtDecomposition<T> {
    /// Squared Schmidt coefficients.
    pub fn weights(&self) -> Vec<T> {
        self.coefficients.iter().map(|&s| s * s).collect()
    }
}

/// Computes the Schmidt decomposition from the spectrum of the A marginal.
pub fn schmidt_decompose<T: Real>(phi: &PureState<T>) -> Result<SchmidtDecomposition<T>> {
    let d = phi.dim();
    let alpha = phi.coefficient_matrix();
    if let Some(sd) = monomial_schmidt(&alpha, d) {
        return Ok(sd);
    }
    let rho_a = (&alpha * &alpha.adjoint()).hermitian_part();
    let spec = hermitian_spectrum(&rho_a)?;
    let cutoff = T::tol(1e-14);
    let mut coefficients = Vec::with_capacity(d);
    let mut cols_b: Vec<Vec<Complex<T>>> = Vec::with_capacity(d);
    for i in 0..d {
        let p = spec.values[i].max(T::zero());
        let s = p.sqrt();
        coefficients.push(s);
        if s > cutoff {
            // b_i = αᵀ conj(a_i) / s_i
            let a_conj: Vec<_> = spec.vector(i).iter().map(|z| z.conj()).collect();
            let b: Vec<_> = alpha.transpose().mul_vec(&a_conj).into_iter().map(|z| z / s).collect();
            cols_b.push(b);
        }
    }
    complete_orthonormal(&mut cols_b, d);
    Ok(SchmidtDecomposition { coefficients, basis_a: spec.vectors, basis_b: CMatrix::from_columns(&cols_b) })
}

/// Computational-basis decomposition when every row and column of the
/// coefficient matrix has at most one nonzero entry. Degenerate
/// coefficients then keep product basis vectors instead of an arbitrary
/// rotation inside the degenerate subspace.
fn monomial_schmidt<T: Real>(alpha: &CMatrix<T>, d: usize) -> Option<SchmidtDecomposition<T>> {
    let cutoff = T::tol(1e-13);
    let mut entries = Vec::with_capacity(d);
    let mut used_cols = vec![false; d];
    for j in 0..d {
        let mut hit = None;
        for (jb, used) in used_cols.iter_mut().enumerate() {
            let z = alpha.row(j)[jb];
            if z.norm() > cutoff {
                if hit.is_some() || *used {
                    return None;
                }
                *used = true;
                hit = Some((jb, z));
            }
        }
        if let Some((jb, z)) = hit {
            entries.push((j, jb, z));
        }
    }
    // stable sort keeps ties in index order
    entries.sort_by(|x, y| y.2.norm().partial_cmp(&x.2.norm()).unwrap_or(std::cmp::Ordering::Equal));
    let unit = |k: usize, phase: Complex<T>| {
        let mut v = vec![Complex::zero(); d];
        v[k] = phase;
        v
    };
    let mut cols_a = Vec::with_capacity(d);
    let mut cols_b = Vec::with_capacity(d);
    let mut coefficients = Vec::with_capacity(d);
    for &(j, jb, z) in &entries {
        let s = z.norm();
        coefficients.push(s);
        cols_a.push(unit(j, Complex::one()));
        cols_b.push(unit(jb, z / s));
    }
    coefficients.resize(d, T::zero());
    complete_orthonormal(&mut cols_a, d);
    complete_orthonormal(&mut cols_b, d);
    Some(SchmidtDecomposition {
        coefficients,
        basis_a: CMatrix::from_columns(&cols_a),
        basis_b: CMatrix::from_columns(&cols_b),
    })
}

/// Extends orthonormal columns to a full basis of C^d by Gram-Schmidt on
/// the computational basis.
fn complete_orthonormal<T: Real>(cols: &mut Vec<Vec<Complex<T>>>, d: usize) {
    let mut e = 0;
    while cols.len() < d && e < d {
        let mut v = vec![Complex::zero(); d];
        v[e] = Complex::one();
        for _ in 0..2 {
            for c in cols.iter() {
                let proj: Complex<T> = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, &ci) in v.iter_mut().zip(c) {
                    *x -= ci * proj;
                }
            }
        }
        let n = norm(&v);
        if n > T::lit(1e-6) {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
        e += 1;
    }
}
