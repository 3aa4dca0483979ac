//! Scalar abstraction shared by the numerical core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the core algorithms are written against (`f32` or `f64`).
///
/// The two tolerance constants scale the identity checks to the precision of
/// the type: `f64` uses the 1e-10 / 1e-12 thresholds throughout.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Tolerance for matrix identities (reconstruction, symmetry, KKT residuals).
    const MATRIX_TOL: Self;
    /// Tolerance for scalar identities (recursion residuals, fixed points).
    const SCALAR_TOL: Self;
    /// Eigenvalues at or below this are treated as non-positive.
    const PD_FLOOR: Self;
}

impl Real for f64 {
    const MATRIX_TOL: Self = 1e-10;
    const SCALAR_TOL: Self = 1e-12;
    const PD_FLOOR: Self = 1e-12;
}

impl Real for f32 {
    const MATRIX_TOL: Self = 1e-4;
    const SCALAR_TOL: Self = 1e-5;
    const PD_FLOOR: Self = 1e-7;
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
