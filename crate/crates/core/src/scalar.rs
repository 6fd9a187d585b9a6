//! Scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Never fails for the supported types.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn tau() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Pairwise (cascade) summation in the order given.
///
/// The reduction tree depends only on the slice length, so results are bit
/// stable regardless of how the terms were produced.
pub fn pairwise_sum<T: Real>(terms: &[T]) -> T {
    const LEAF: usize = 8;
    if terms.len() <= LEAF {
        return terms.iter().fold(T::zero(), |acc, &v| acc + v);
    }
    let mid = terms.len() / 2;
    pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
}

/// Wraps an angle difference measured in turns into `(-1/2, 1/2]`.
#[inline]
pub fn wrap_turns<T: Real>(d: T) -> T {
    let half = T::lit(0.5);
    let mut w = d - d.round();
    if w <= -half {
        w = w + T::one();
    }
    if w > half {
        w = w - T::one();
    }
    w
}

/// Angle of `(x, y)` in turns, in `(-1/2, 1/2]`.
#[inline]
pub fn angle_turns<T: Real>(x: T, y: T) -> T {
    y.atan2(x) / T::tau()
}
