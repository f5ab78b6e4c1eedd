//! Floating-point abstraction shared by every numeric routine in the crate.
//!
//! All indicators, metrics and classifiers are written against [`Scalar`]
//! so the same code runs in `f32` or `f64`. The pipeline and the CLI use
//! `f64` through the aliases exported at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + FromStr
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every value used this way is representable
    /// (possibly rounded) in any float type, so this never fails.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal converts to scalar")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count converts to scalar")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn hundred() -> Self {
        Self::lit(100.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Numerically stable logistic function.
pub fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// `ln(1 + exp(z))` without overflow.
pub fn softplus<T: Scalar>(z: T) -> T {
    if z > T::lit(30.0) {
        z
    } else if z < T::lit(-30.0) {
        z.exp()
    } else {
        z.exp().ln_1p()
    }
}

pub fn all_finite<T: Scalar>(xs: &[T]) -> bool {
    xs.iter().all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_symmetric_and_exact_at_zero() {
        assert_eq!(sigmoid(0.0f64), 0.5);
        assert_eq!(sigmoid(0.0f32), 0.5);
        for z in [-40.0, -3.0, -0.1, 0.7, 12.0, 800.0] {
            let s: f64 = sigmoid(z) + sigmoid(-z);
            assert!((s - 1.0).abs() < 1e-15, "z={z}");
        }
        assert!(sigmoid(-800.0f64) >= 0.0);
    }

    #[test]
    fn softplus_matches_naive_in_safe_range() {
        for z in [-5.0f64, -1.0, 0.0, 2.0, 7.0] {
            assert!((softplus(z) - (1.0 + z.exp()).ln()).abs() < 1e-12);
        }
        assert_eq!(softplus(1000.0f64), 1000.0);
    }
}
