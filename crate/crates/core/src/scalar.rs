//! Scalar abstraction: the numeric type all estimator math is generic over.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable throughout the crate (f32 or f64).
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

/// Convert an `f64` constant (tolerance, threshold) into the working scalar.
///
/// Values that underflow the target type collapse to zero, which is the
/// right behaviour for the thresholds this is used with.
pub(crate) fn cast<T: Scalar>(value: f64) -> T {
    T::from_f64(value).unwrap_or_else(T::zero)
}

/// n! as a scalar; exact for the small n used by the moment systems.
pub(crate) fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| {
        acc * T::from_usize(k).expect("factorial argument fits the scalar type")
    })
}

/// Threshold below which a computed weight is flushed to exact zero.
///
/// Covers subnormals of the working type; for f64 the cut sits at 1e-300 so
/// effective-support counting never sees denormal dust.
pub(crate) fn weight_flush_threshold<T: Scalar>() -> T {
    cast::<T>(1e-300).max(T::min_positive_value())
}
