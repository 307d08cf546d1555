//! Noise-resistance thresholds.
//!
//! A threshold here is always relative to one functional evaluated with one
//! fixed set of measurements: `lambda_star` is the smallest weight of the
//! entangled state in `λ|φ⟩⟨φ| + (1-λ)σ` for which those measurements still
//! violate the local bound. It says nothing about local models for other
//! measurements.


use crate::bell::{chsh_functional, lv_bound, BellFunctional};
use crate::error::{Error, Result};
use crate::quantum::{bell_value, chsh_embedded_settings, LocalMeasurements};
use crate::scalar::{Coefficient, Real};
use crate::tensor::{
    check_dim, kron_vec, partial_trace, schmidt_decompose, schmidt_state, CMatrix, DensityMatrix, PureState, Subsystem,
};

/// What the entangled state is mixed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseModel {
    /// `identity / d²`
    White,
    /// `tr_B(φ) ⊗ tr_A(φ)`
    ProductMarginals,
    /// The separable state closest to a pure state in relative entropy,
    /// `Σ p_i |a_i b_i⟩⟨a_i b_i|` over the Schmidt basis.
    ClosestSeparablePure,
}

impl NoiseModel {
    pub const ALL: [NoiseModel; 3] = [NoiseModel::White, NoiseModel::ProductMarginals, NoiseModel::ClosestSeparablePure];

    pub fn name(self) -> &'static str {
        match self {
            NoiseModel::White => "white",
            NoiseModel::ProductMarginals => "marginals",
            NoiseModel::ClosestSeparablePure => "closest-sep",
        }
    }
}

/// Noise state associated with `phi` under `model`.
pub fn noise_state<T: Real>(phi: &PureState<T>, model: NoiseModel) -> Result<DensityMatrix<T>> {
    let d = phi.dim();
    match model {
        NoiseModel::White => DensityMatrix::maximally_mixed(d),
        NoiseModel::ProductMarginals => {
            let rho = phi.projector();
            let ra = partial_trace(&rho, Subsystem::B);
            let rb = partial_trace(&rho, Subsystem::A);
            DensityMatrix::product(&ra.hermitian_part(), &rb.hermitian_part())
        }
        NoiseModel::ClosestSeparablePure => {
            let sd = schmidt_decompose(phi)?;
            let mut m = CMatrix::zeros(d * d, d * d);
            for (i, p) in sd.weights().into_iter().enumerate() {
                if p <= T::zero() {
                    continue;
                }
                let v = kron_vec(&sd.basis_a.column(i), &sd.basis_b.column(i));
                m.add_scaled(p, &CMatrix::outer(&v, &v));
            }
            Ok(DensityMatrix::from_parts_unchecked(d, m.hermitian_part()))
        }
    }
}

/// Critical mixing weight for one noise model.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport<T> {
    pub model: NoiseModel,
    /// `(bound - noise) / (signal - noise)`, clipped to [0, 1].
    pub lambda_star: T,
    /// Bell value of the entangled state.
    pub signal_value: T,
    /// Bell value of the noise state.
    pub noise_value: T,
    /// Enumerated local bound of the functional.
    pub bound: T,
    /// Whether the unclipped value fell outside [0, 1].
    pub clipped: bool,
}

/// `λ*` from the three Bell values; errors when there is no violation.
pub fn threshold_from_values<T: Real>(model: NoiseModel, signal: T, noise: T, bound: T) -> Result<ThresholdReport<T>> {
    if !(signal > bound) {
        return Err(Error::NoViolation {
            signal: signal.to_f64().unwrap_or(f64::NAN),
            bound: bound.to_f64().unwrap_or(f64::NAN),
        });
    }
    let raw = (bound - noise) / (signal - noise);
    let lambda_star = raw.max(T::zero()).min(T::one());
    Ok(ThresholdReport { model, lambda_star, signal_value: signal, noise_value: noise, bound, clipped: lambda_star != raw })
}

fn bound_of<C: Coefficient, T: Real>(f: &BellFunctional<C>) -> Result<T> {
    Ok(lv_bound(f)?.value.to_real())
}

/// Smallest weight of `phi` whose mixture with the model's noise still
/// violates `f` under `s`.
pub fn threshold<C, T, M>(phi: &PureState<T>, f: &BellFunctional<C>, s: &M, model: NoiseModel) -> Result<ThresholdReport<T>>
where
    C: Coefficient,
    T: Real,
    M: LocalMeasurements<T> + ?Sized,
{
    let bound = bound_of(f)?;
    let signal = bell_value(f, &phi.projector(), s)?;
    let noise = bell_value(f, &noise_state(phi, model)?, s)?;
    threshold_from_values(model, signal, noise, bound)
}

/// Thresholds for all three noise models, in [`NoiseModel::ALL`] order.
pub fn compare_measures<C, T, M>(phi: &PureState<T>, f: &BellFunctional<C>, s: &M) -> Result<[ThresholdReport<T>; 3]>
where
    C: Coefficient,
    T: Real,
    M: LocalMeasurements<T> + ?Sized,
{
    let bound = bound_of(f)?;
    let signal = bell_value(f, &phi.projector(), s)?;
    let report = |model| -> Result<ThresholdReport<T>> {
        let noise = bell_value(f, &noise_state(phi, model)?, s)?;
        threshold_from_values(model, signal, noise, bound)
    };
    Ok([report(NoiseModel::White)?, report(NoiseModel::ProductMarginals)?, report(NoiseModel::ClosestSeparablePure)?])
}

/// Closed-form white-noise threshold of `(|00⟩ + |11⟩)/√2` in C^d ⊗ C^d
/// under the embedded CHSH settings: `(1 - x) / (√2 - x)`, `x = ((d-2)/d)²`.
pub fn chsh_embed_resistance<T: Real>(d: usize) -> Result<T> {
    check_dim(d)?;
    let dt = T::from_usize_lossy(d);
    let x = ((dt - T::lit(2.0)) / dt).powi(2);
    Ok((T::one() - x) / (T::SQRT_2() - x))
}

/// The same threshold computed from the Bell operator of the embedded
/// CHSH settings.
pub fn chsh_embed_numeric<T: Real>(d: usize) -> Result<ThresholdReport<T>> {
    check_dim(d)?;
    let mut coeffs = vec![T::zero(); d];
    coeffs[0] = T::one();
    coeffs[1] = T::one();
    let psi2 = schmidt_state(&coeffs)?;
    threshold(&psi2, &chsh_functional::<f64>(d)?, &chsh_embedded_settings::<T>(d)?, NoiseModel::White)
}

/// Mixture `λ|φ⟩⟨φ| + (1-λ)σ` for a noise model.
pub fn noisy_state<T: Real>(phi: &PureState<T>, lambda: T, model: NoiseModel) -> Result<DensityMatrix<T>> {
    DensityMatrix::mixture(lambda, &phi.projector(), &noise_state(phi, model)?)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::cglmp_functional;
    use crate::quantum::canonical_settings;
    use crate::tensor::max_entangled;

    #[test]
    fn marginals_of_max_entangled_are_white() {
        let psi = max_entangled::<f64>(3).unwrap();
        let a = noise_state(&psi, NoiseModel::ProductMarginals).unwrap();
        let w = noise_state(&psi, NoiseModel::White).unwrap();
        assert!(a.matrix().max_abs_diff(w.matrix()) < 1e-15);
        let c = noise_state(&psi, NoiseModel::ClosestSeparablePure).unwrap();
        // Σ_i |ii⟩⟨ii| / 3
        for i in 0..9 {
            let expect = if i % 4 == 0 { 1.0 / 3.0 } else { 0.0 };
            assert!((c.matrix()[(i, i)].re - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn max_entangled_white_threshold() {
        let psi = max_entangled::<f64>(3).unwrap();
        let r = threshold(&psi, &cglmp_functional::<f64>(3).unwrap(), &canonical_settings(3).unwrap(), NoiseModel::White).unwrap();
        let i3 = 4.0 * (2.0 * 3f64.sqrt() + 3.0) / 9.0;
        assert!((r.lambda_star - 2.0 / i3).abs() < 1e-12);
        assert!(!r.clipped);
    }

    #[test]
    fn product_state_has_no_violation() {
        let phi = schmidt_state(&[1.0, 0.0, 0.0]).unwrap();
        let err = threshold(&phi, &cglmp_functional::<f64>(3).unwrap(), &canonical_settings(3).unwrap(), NoiseModel::White);
        assert!(matches!(err, Err(Error::NoViolation { .. })));
    }

    #[test]
    fn clipping_flag() {
        let r = threshold_from_values(NoiseModel::White, 3.0, 2.5, 2.0).unwrap();
        assert_eq!(r.lambda_star, 0.0);
        assert!(r.clipped);
    }

    #[test]
    fn embed_closed_form_values() {
        assert!((chsh_embed_resistance::<f64>(2).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((chsh_embed_resistance::<f64>(10).unwrap() - 0.36 / (2f64.sqrt() - 0.64)).abs() < 1e-15);
        assert!(chsh_embed_resistance::<f64>(1).is_err());
    }
}
