//! Scalar abstraction: all core math is generic over the floating-point type.

use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the simulator: `f32` or `f64`.
pub trait Scalar: nalgebra::RealField + Copy + FromPrimitive + ToPrimitive {}

impl<T> Scalar for T where T: nalgebra::RealField + Copy + FromPrimitive + ToPrimitive {}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics if the value is not representable, which cannot happen for the
/// finite constants used in this crate.
#[inline]
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}

/// Converts a `usize` count into the working scalar type.
#[inline]
pub fn real_of_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}
