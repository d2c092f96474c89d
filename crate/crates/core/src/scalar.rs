//! Scalar abstraction over the working floating-point type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the library is generic over.
///
/// Implemented by `f32` and `f64` through the blanket impl below.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssignOps
    + Sum<Self>
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: num_traits::Float
        + num_traits::FloatConst
        + num_traits::FromPrimitive
        + num_traits::NumAssignOps
        + Sum<Self>
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Convert an `f64` constant into the working scalar.
#[inline]
pub fn cast<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

/// Convert a small integer into the working scalar exactly.
#[inline]
pub fn cast_i32<T: Real>(x: i32) -> T {
    T::from_i32(x).expect("integer not representable in scalar type")
}
