//! Maximal violations from Bell-operator spectra.

use num_complex::Complex;
use rayon::prelude::*;

use crate::bell::cglmp_functional;
use crate::error::{Error, Result};
use crate::quantum::{bell_operator, canonical_settings};
use crate::scalar::Real;
use crate::tensor::{hermitian_spectrum, local_dim_of, max_entangled, CMatrix, PureState};

/// Absolute off-block norm tolerated by [`block_decompose`].
pub const BLOCK_TOL: f64 = 1e-10;

/// Relative gap below which the top eigenvalue counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Largest eigenvalue of a Bell operator and its eigenvector.
#[derive(Debug, Clone)]
pub struct MaxViolation<T> {
    pub value: T,
    /// Unit eigenvector, largest-modulus amplitude real and positive.
    pub state: PureState<T>,
    /// Set when the top eigenvalue is degenerate; `state` is then one
    /// arbitrary vector of the top eigenspace.
    pub degenerate: bool,
}

/// Largest eigenvalue and eigenvector of a Hermitian d² x d² operator.
pub fn max_violation<T: Real>(b: &CMatrix<T>) -> Result<MaxViolation<T>> {
    let d = local_dim_of(b)?;
    let spec = hermitian_spectrum(b)?;
    let value = spec.max();
    let degenerate = spec.values.len() > 1
        && (spec.values[0] - spec.values[1]) <= T::tol(DEGENERACY_TOL) * T::one().max(value.abs());
    let state = PureState::normalized(d, spec.vector(0))?.with_canonical_phase();
    Ok(MaxViolation { value, state, degenerate })
}

/// Restriction of an operator to the span of `{|j, (j + r) mod d⟩ : j}`.
#[derive(Debug, Clone)]
pub struct ReducedBlock<T> {
    /// `r`, the `(jb - j) mod d` grade.
    pub grade: usize,
    /// Basis labels `(j, jb)` in matrix order.
    pub basis: Vec<(usize, usize)>,
    pub matrix: CMatrix<T>,
}

impl<T: Real> ReducedBlock<T> {
    /// Same block with the basis cyclically shifted so that it starts at
    /// `|shift, shift + r⟩`; this is the relabeling `|j, jb⟩ → |j+1, jb+1⟩`
    /// applied `shift` times.
    pub fn rotated(&self, shift: usize) -> Self {
        let d = self.basis.len();
        let idx = |i: usize| (i + shift) % d;
        Self {
            grade: self.grade,
            basis: (0..d).map(|i| self.basis[idx(i)]).collect(),
            matrix: CMatrix::from_fn(d, d, |i, k| self.matrix[(idx(i), idx(k))]),
        }
    }
}

/// Splits an operator that is block diagonal in the `(jb - j) mod d` grading
/// into its `d` reduced blocks, block `r` spanned by `|j, (j + r) mod d⟩`.
pub fn block_decompose<T: Real>(b: &CMatrix<T>) -> Result<Vec<ReducedBlock<T>>> {
    let d = local_dim_of(b)?;
    let grade = |idx: usize| (idx % d + d - idx / d) % d;
    let mut off = T::zero();
    for i in 0..d * d {
        for k in 0..d * d {
            if grade(i) != grade(k) {
                off += b[(i, k)].norm_sqr();
            }
        }
    }
    let off = off.sqrt();
    if off > T::tol(BLOCK_TOL) {
        return Err(Error::NotBlockDiagonal(off.to_f64().unwrap_or(f64::NAN)));
    }
    Ok((0..d)
        .map(|r| {
            let basis: Vec<_> = (0..d).map(|j| (j, (j + r) % d)).collect();
            let index = |(j, jb): (usize, usize)| j * d + jb;
            let matrix = CMatrix::from_fn(d, d, |i, k| b[(index(basis[i]), index(basis[k]))]);
            ReducedBlock { grade: r, basis, matrix }
        })
        .collect())
}

/// Embeds reduced blocks back into the full d² x d² operator.
pub fn block_assemble<T: Real>(blocks: &[ReducedBlock<T>]) -> CMatrix<T> {
    let d = blocks.len();
    let mut out = CMatrix::zeros(d * d, d * d);
    for block in blocks {
        for (i, &(j, jb)) in block.basis.iter().enumerate() {
            for (k, &(m, mb)) in block.basis.iter().enumerate() {
                out[(j * d + jb, m * d + mb)] = block.matrix[(i, k)];
            }
        }
    }
    out
}

/// Grade-0 reduced operator at d = 3 when A's first phase vector becomes
/// `(0, alpha, beta)` and every other phase keeps its canonical value.
pub fn varied_red1<T: Real>(alpha: T, beta: T) -> CMatrix<T> {
    let third = T::one() / T::lit(3.0);
    let s3 = T::lit(3.0).sqrt();
    let three = T::lit(3.0);
    let fixed = CMatrix::from_fn(3, 3, |i, k| {
        let v = match (i.min(k), i.max(k)) {
            (0, 1) | (1, 2) => s3,
            (0, 2) => three,
            _ => T::zero(),
        };
        Complex::new(v * third, T::zero())
    });
    let e = |x: T| Complex::from_polar(third, x);
    let mut varied = CMatrix::zeros(3, 3);
    varied[(0, 1)] = e(alpha) * s3;
    varied[(1, 0)] = e(-alpha) * s3;
    varied[(0, 2)] = e(beta) * three;
    varied[(2, 0)] = e(-beta) * three;
    varied[(1, 2)] = e(beta - alpha) * s3;
    varied[(2, 1)] = e(alpha - beta) * s3;
    &fixed + &varied
}

/// One row of the violation table.
#[derive(Debug, Clone)]
pub struct ViolationReport<T> {
    pub d: usize,
    /// `⟨Ψ|B|Ψ⟩` for the maximally entangled state.
    pub value_max_entangled: T,
    /// Largest eigenvalue of the canonical operator.
    pub value_operator_max: T,
    /// Middle Schmidt coefficient of the maximizing state relative to the
    /// outer ones; reported for d = 3 only.
    pub gamma: Option<T>,
    pub optimal_state: PureState<T>,
    pub difference_percent: T,
    pub degenerate: bool,
}

/// Violation report for one dimension with canonical Fourier settings.
pub fn violation_report<T: Real>(d: usize) -> Result<ViolationReport<T>> {
    let f = cglmp_functional::<f64>(d)?;
    let b: CMatrix<T> = bell_operator(&f, &canonical_settings::<T>(d)?)?;
    let psi = max_entangled::<T>(d)?;
    let value_max_entangled = b.expectation(psi.amplitudes());
    let top = max_violation(&b)?;
    let gamma = (d == 3).then(|| {
        let s = &top.state;
        s.amplitude(1, 1).norm() / s.amplitude(0, 0).norm()
    });
    let hundred = T::lit(100.0);
    Ok(ViolationReport {
        d,
        value_max_entangled,
        value_operator_max: top.value,
        gamma,
        difference_percent: hundred * (top.value / value_max_entangled - T::one()),
        optimal_state: top.state,
        degenerate: top.degenerate,
    })
}

/// Violation reports for `d_min..=d_max`, computed in parallel.
pub fn table1<T: Real>(d_min: usize, d_max: usize) -> Result<Vec<ViolationReport<T>>> {
    if d_min < 3 || d_min > d_max {
        return Err(Error::Domain(format!("dimension range {d_min}..={d_max} must satisfy 3 <= d_min <= d_max")));
    }
    (d_min..=d_max).into_par_iter().map(violation_report).collect()
}
