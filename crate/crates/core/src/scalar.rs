//! Scalar traits the numerical code is generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign, ToPrimitive};

/// Real floating-point field used for amplitudes, operators and spectra.
///
/// Implemented for `f32` and `f64`. Tolerances throughout the crate are
/// written for `f64` and widened through [`Real::tol`] for coarser types.
pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// A tolerance stated for `f64`, floored at a small multiple of this
    /// type's machine epsilon.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(x).max(floor)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Coefficient type of a Bell functional.
///
/// Besides the float types this is implemented for `Ratio<i64>`, which makes
/// local-variable bounds exact.
pub trait Coefficient: Clone + PartialOrd + Num + ToPrimitive + Debug + Send + Sync + 'static {
    /// The value `num / den`.
    fn ratio(num: i64, den: i64) -> Self;

    /// Lossy conversion into a real scalar.
    #[inline]
    fn to_real<T: Real>(&self) -> T {
        T::from_f64(self.to_f64().expect("finite coefficient")).expect("representable")
    }
}

impl Coefficient for f64 {
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Coefficient for f32 {
    fn ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
}

impl Coefficient for Ratio<i64> {
    fn ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
}
