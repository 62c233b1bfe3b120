use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for distances, weights, breakpoints and function values.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for types that cannot represent
    /// ordinary finite constants.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("scalar type cannot represent a finite f64 constant")
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    /// `2⁻ⁿ`, exact for every `n` in the normal range of the type.
    fn pow2_neg(n: u32) -> Self {
        let mut value = Self::one();
        let half = Self::half();
        for _ in 0..n {
            value = value * half;
        }
        value
    }

    fn from_usize_lossy(value: usize) -> Self {
        Self::from_usize(value).expect("integer not representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}
