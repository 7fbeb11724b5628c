//! Scalar abstraction for the numeric pipeline.
//!
//! Everything numeric in this crate is generic over [`Real`], so the same
//! code runs in `f32` or `f64`. The crate root exports `f64` aliases for
//! the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar usable throughout the pipeline: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum<Self>
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Lossy `f64 -> T` conversion for constants and seeded noise draws.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 constant")
}

/// `usize -> T` conversion for counts and denominators.
#[inline]
pub fn real_of_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("usize fits in scalar")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        assert_eq!(real::<f64>(0.5), 0.5);
        assert_eq!(real::<f32>(0.5), 0.5f32);
        assert_eq!(real_of_usize::<f64>(7), 7.0);
    }
}
