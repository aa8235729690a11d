use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar used by the measure, kernel, exponent and solver code.
///
/// Implemented for `f32` and `f64`. Quadrature, gauge evaluation and Monte Carlo
/// run on `f64` only; everything else is written against this trait.
pub trait Real:
    'static
    + Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Default
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
{
    /// Converts an `f64` literal. Panics only for types that cannot hold a finite f64.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Tolerance for invariant checks: `1e-12` for f64, `1e-5` for f32.
    fn default_tol() -> Self;
}

impl Real for f32 {
    fn default_tol() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn default_tol() -> Self {
        1e-12
    }
}

/// Positive part `max(v, 0)`.
#[inline]
pub fn pos<T: Real>(v: T) -> T {
    if v > T::zero() {
        v
    } else {
        T::zero()
    }
}

/// Negative part `max(-v, 0)`.
#[inline]
pub fn neg<T: Real>(v: T) -> T {
    if v < T::zero() {
        -v
    } else {
        T::zero()
    }
}
