//! Entanglement witnesses built from Bell operators, their decomposition
//! `W = P + k·Pₐ^{T_A}`, and the singlet-fraction distillability test.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::{
    check_dim, hermitian_spectrum, local_dim_of, max_entangled, min_eigenvalue, partial_transpose, swap_operator,
    CMatrix, DensityMatrix, Subsystem, HERMITIAN_TOL,
};

/// Minimum eigenvalue treated as nonnegative in the decomposition scan.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// Bisection accuracy of the feasible-interval endpoints, in `k`.
pub const BISECTION_TOL: f64 = 1e-6;

/// `W = bound·1 - B`.
#[derive(Debug, Clone)]
pub struct Witness<T> {
    pub d: usize,
    pub matrix: CMatrix<T>,
    /// Local bound used in the construction.
    pub bound: T,
}

impl<T: Real> Witness<T> {
    /// `tr(ρW)`
    pub fn expectation(&self, rho: &DensityMatrix<T>) -> T {
        rho.expectation(&self.matrix)
    }

    /// `W - k·Pₐ^{T_A}`
    pub fn remainder(&self, k: T) -> Result<CMatrix<T>> {
        let pat = partial_transpose(&antisym_projector::<T>(self.d)?, Subsystem::A)?;
        let mut p = self.matrix.clone();
        p.add_scaled(-k, &pat);
        Ok(p)
    }
}

pub fn witness_from<T: Real>(b: &CMatrix<T>, bound: T) -> Result<Witness<T>> {
    let d = local_dim_of(b)?;
    let residual = b.hermiticity_residual();
    if residual > T::tol(HERMITIAN_TOL) * T::one().max(b.max_abs()) {
        return Err(Error::NotHermitian(residual.to_f64().unwrap_or(f64::NAN)));
    }
    let mut w = CMatrix::identity(d * d).scale(bound);
    w.add_scaled(-T::one(), b);
    Ok(Witness { d, matrix: w.hermitian_part(), bound })
}

/// Projector onto the antisymmetric subspace, `(1 - SWAP)/2`.
pub fn antisym_projector<T: Real>(d: usize) -> Result<CMatrix<T>> {
    check_dim(d)?;
    let mut p = CMatrix::identity(d * d);
    p.add_scaled(-T::one(), &swap_operator(d));
    Ok(p.scale(T::lit(0.5)))
}

/// Minimum eigenvalue of `W - k·Pₐ^{T_A}` over a uniform grid in `k`.
#[derive(Debug, Clone)]
pub struct DecompositionScan<T> {
    pub k_values: Vec<T>,
    pub min_eigenvalues: Vec<T>,
    /// Range of `k` where `W - k·Pₐ^{T_A} ≥ -FEASIBILITY_TOL`, endpoints
    /// refined by bisection.
    pub feasible_interval: Option<(T, T)>,
}

impl<T: Real> DecompositionScan<T> {
    pub fn is_decomposable(&self) -> bool {
        self.feasible_interval.is_some()
    }

    pub fn contains(&self, k: T) -> bool {
        self.feasible_interval.is_some_and(|(lo, hi)| lo <= k && k <= hi)
    }

    /// Largest minimum eigenvalue on the grid, with its `k`.
    pub fn best(&self) -> (T, T) {
        let mut best = (self.k_values[0], self.min_eigenvalues[0]);
        for (&k, &m) in self.k_values.iter().zip(&self.min_eigenvalues) {
            if m > best.1 {
                best = (k, m);
            }
        }
        best
    }
}

/// Scans `k` on `steps` uniform points of `[k_min, k_max]`.
///
/// `λ_min(W - k X)` is concave in `k`, so the feasible set is an interval;
/// it is bracketed by the outermost feasible grid points and each endpoint
/// is bisected against its infeasible neighbour.
pub fn scan_decomposition<T: Real>(w: &Witness<T>, k_min: T, k_max: T, steps: usize) -> Result<DecompositionScan<T>> {
    if !(k_min < k_max) || steps < 2 {
        return Err(Error::Domain(format!("need k_min < k_max and steps >= 2 (got {k_min}, {k_max}, {steps})")));
    }
    let pat = partial_transpose(&antisym_projector::<T>(w.d)?, Subsystem::A)?;
    let min_at = |k: T| -> Result<T> {
        let mut p = w.matrix.clone();
        p.add_scaled(-k, &pat);
        min_eigenvalue(&p)
    };
    let span = k_max - k_min;
    let last = T::from_usize_lossy(steps - 1);
    let k_values: Vec<T> = (0..steps)
        .map(|i| if i == steps - 1 { k_max } else { k_min + span * T::from_usize_lossy(i) / last })
        .collect();
    let min_eigenvalues = k_values.par_iter().map(|&k| min_at(k)).collect::<Result<Vec<T>>>()?;

    let tol = -T::tol(FEASIBILITY_TOL);
    let feasible = |m: T| m >= tol;
    let first = min_eigenvalues.iter().position(|&m| feasible(m));
    let last_idx = min_eigenvalues.iter().rposition(|&m| feasible(m));
    let feasible_interval = match (first, last_idx) {
        (Some(i), Some(j)) => {
            let bisect = |mut good: T, mut bad: T| -> Result<T> {
                while (good - bad).abs() > T::lit(BISECTION_TOL) {
                    let mid = (good + bad) / T::lit(2.0);
                    if feasible(min_at(mid)?) {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
                Ok(good)
            };
            let lo = if i > 0 { bisect(k_values[i], k_values[i - 1])? } else { k_values[i] };
            let hi = if j + 1 < steps { bisect(k_values[j], k_values[j + 1])? } else { k_values[j] };
            Some((lo, hi))
        }
        _ => None,
    };
    Ok(DecompositionScan { k_values, min_eigenvalues, feasible_interval })
}

/// Positive operators with `W = P + Q^{T_A}` at a given `k`.
#[derive(Debug, Clone)]
pub struct Decomposition<T> {
    pub k: T,
    pub p: CMatrix<T>,
    /// `k·Pₐ`
    pub q: CMatrix<T>,
    pub min_eigenvalue_p: T,
    pub min_eigenvalue_q: T,
}

/// Builds `P = W - k·Pₐ^{T_A}` and `Q = k·Pₐ` and returns them when both
/// are positive within [`FEASIBILITY_TOL`].
pub fn decomposition_at<T: Real>(w: &Witness<T>, k: T) -> Result<Option<Decomposition<T>>> {
    let pa = antisym_projector::<T>(w.d)?;
    let q = pa.scale(k);
    let p = w.remainder(k)?;
    let min_p = min_eigenvalue(&p)?;
    let min_q = min_eigenvalue(&q)?;
    let tol = -T::tol(FEASIBILITY_TOL);
    Ok((min_p >= tol && min_q >= tol).then_some(Decomposition { k, p, q, min_eigenvalue_p: min_p, min_eigenvalue_q: min_q }))
}

/// `⟨Ψ|ρ|Ψ⟩` for `|Ψ⟩ = Σ|jj⟩/√d` in the computational basis.
///
/// To measure the overlap in another product basis, express `ρ` in that
/// basis first with [`DensityMatrix::in_local_basis`].
pub fn singlet_fraction<T: Real>(rho: &DensityMatrix<T>) -> T {
    let psi = max_entangled::<T>(rho.dim()).expect("density matrices have d >= 2");
    rho.matrix().expectation(psi.amplitudes())
}

/// Outcome of the fidelity test `⟨Ψ|ρ|Ψ⟩ > 1/d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distillability<T> {
    pub distillable: bool,
    /// `⟨Ψ|ρ|Ψ⟩ - 1/d`
    pub margin: T,
}

pub fn distillable_by_fidelity<T: Real>(rho: &DensityMatrix<T>) -> Distillability<T> {
    let margin = singlet_fraction(rho) - T::one() / T::from_usize_lossy(rho.dim());
    Distillability { distillable: margin > T::zero(), margin }
}

/// Eigenvalues of `ρ^{T_A}`, descending.
pub fn partial_transpose_spectrum<T: Real>(rho: &DensityMatrix<T>) -> Result<Vec<T>> {
    Ok(hermitian_spectrum(&partial_transpose(rho.matrix(), Subsystem::A)?)?.values)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::hermitian_eigenvalues;

    #[test]
    fn zero_operator_gives_scaled_identity() {
        let w = witness_from(&CMatrix::<f64>::zeros(9, 9), 2.0).unwrap();
        assert!(w.matrix.max_abs_diff(&CMatrix::identity(9).scale(2.0)) < 1e-15);
    }

    #[test]
    fn antisym_projector_rank() {
        for d in 2..=5 {
            let p = antisym_projector::<f64>(d).unwrap();
            assert!((&p * &p).max_abs_diff(&p) < 1e-15);
            assert!((p.trace().re - (d * (d - 1)) as f64 / 2.0).abs() < 1e-14);
        }
        // d = 2: singlet projector
        let p = antisym_projector::<f64>(2).unwrap();
        let ev = hermitian_eigenvalues(&p).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-15 && ev[1..].iter().all(|v| v.abs() < 1e-15));
        assert!((p[(1, 1)].re - 0.5).abs() < 1e-15 && (p[(1, 2)].re + 0.5).abs() < 1e-15);
        assert!(antisym_projector::<f64>(1).is_err());
    }

    #[test]
    fn singlet_fraction_limits() {
        let rho = max_entangled::<f64>(3).unwrap().projector();
        assert!((singlet_fraction(&rho) - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::<f64>::maximally_mixed(3).unwrap();
        assert!((singlet_fraction(&mixed) - 1.0 / 9.0).abs() < 1e-15);
        let v = distillable_by_fidelity(&mixed);
        assert!(!v.distillable);
        assert!((v.margin - (1.0 / 9.0 - 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn singlet_fraction_is_linear_in_mixing() {
        let psi = max_entangled::<f64>(3).unwrap().projector();
        let mixed = DensityMatrix::<f64>::maximally_mixed(3).unwrap();
        for lambda in [0.0, 0.3, 0.6962, 1.0] {
            let rho = DensityMatrix::mixture(lambda, &psi, &mixed).unwrap();
            assert!((singlet_fraction(&rho) - (lambda + (1.0 - lambda) / 9.0)).abs() < 1e-14);
        }
        let rho = DensityMatrix::mixture(0.70, &psi, &mixed).unwrap();
        assert!(distillable_by_fidelity(&rho).distillable);
    }

    #[test]
    fn scan_arguments() {
        let w = witness_from(&CMatrix::<f64>::zeros(4, 4), 2.0).unwrap();
        assert!(scan_decomposition(&w, 1.0, 1.0, 10).is_err());
        assert!(scan_decomposition(&w, 0.0, 1.0, 1).is_err());
        let s = scan_decomposition(&w, 0.0, 1.0, 11).unwrap();
        assert_eq!(s.k_values.len(), 11);
        assert_eq!(s.feasible_interval, Some((0.0, 1.0)));
    }
}
