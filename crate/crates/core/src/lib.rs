//! Numerical toolkit for Bell nonlocality of two d-level systems.
//!
//! Builds CGLMP and CHSH Bell functionals, certifies their local bounds by
//! enumerating deterministic strategies, turns them into Bell operators for
//! Fourier-type or arbitrary projective measurements, and analyses the
//! resulting operators: maximal violations and their block structure,
//! noise-resistance thresholds, entanglement-witness decompositions and the
//! singlet-fraction distillability test. A see-saw optimizer searches
//! states and measurements directly.
//!
//! Numerical code is generic over [`Real`] (`f32`, `f64`); functional
//! coefficients are generic over [`Coefficient`], which also covers
//! `Ratio<i64>` for exact local bounds. The aliases below fix the common
//! choices.

#![allow(clippy::needless_range_loop, clippy::assign_op_pattern, clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod error;
pub mod quantum;
pub mod resistance;
pub mod scalar;
pub mod seesaw;
pub mod spectra;
pub mod tensor;
pub mod witness;

pub use error::{Error, Result};
pub use scalar::{Coefficient, Real};

pub use num_complex::Complex;
pub use num_rational::Rational64;

/// Double-precision complex matrix.
pub type CMatrix64 = tensor::CMatrix<f64>;
pub type PureState64 = tensor::PureState<f64>;
pub type DensityMatrix64 = tensor::DensityMatrix<f64>;
pub type UnitaryMatrix64 = tensor::UnitaryMatrix<f64>;
pub type MeasurementSettings64 = quantum::MeasurementSettings<f64>;
pub type ProbabilityTable64 = bell::ProbabilityTable<f64>;
pub type Witness64 = witness::Witness<f64>;
/// Functional with `f64` coefficients.
pub type BellFunctional64 = bell::BellFunctional<f64>;
/// Functional with exact rational coefficients.
pub type ExactFunctional = bell::BellFunctional<Rational64>;

/// Single-precision counterparts.
pub type CMatrix32 = tensor::CMatrix<f32>;
pub type PureState32 = tensor::PureState<f32>;
pub type DensityMatrix32 = tensor::DensityMatrix<f32>;
pub type MeasurementSettings32 = quantum::MeasurementSettings<f32>;

/// Library version string.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
