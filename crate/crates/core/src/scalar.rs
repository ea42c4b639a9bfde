//! Scalar abstraction shared by every numerical kernel in the crate.
//!
//! All core math is generic over [`Scalar`] so the same code runs on `f32`,
//! `f64`, and the dual-number types from [`crate::autodiff`]. Real float
//! types get their implementation through `num_traits::Float`; dual numbers
//! implement the trait directly and propagate tangents through every
//! primitive.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Field and elementary-function operations required by the solvers.
///
/// `PartialOrd` on non-real implementors (dual numbers) compares primal
/// parts only, which is the standard convention for branching inside
/// differentiated code.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;

    /// Innermost primal value. For duals this recurses through the nesting.
    fn value(self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn is_finite(self) -> bool;

    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }

    fn max(self, other: Self) -> Self {
        if self < other {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn clamp(self, lo: Self, hi: Self) -> Self {
        self.max(lo).min(hi)
    }
}

macro_rules! impl_scalar_for_float {
    ($t:ty) => {
        impl Scalar for $t {
            fn zero() -> Self {
                num_traits::Zero::zero()
            }
            fn one() -> Self {
                num_traits::One::one()
            }
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn value(self) -> f64 {
                self as f64
            }
            fn sin(self) -> Self {
                num_traits::Float::sin(self)
            }
            fn cos(self) -> Self {
                num_traits::Float::cos(self)
            }
            fn tanh(self) -> Self {
                num_traits::Float::tanh(self)
            }
            fn exp(self) -> Self {
                num_traits::Float::exp(self)
            }
            fn ln(self) -> Self {
                num_traits::Float::ln(self)
            }
            fn sqrt(self) -> Self {
                num_traits::Float::sqrt(self)
            }
            fn abs(self) -> Self {
                num_traits::Float::abs(self)
            }
            fn powi(self, n: i32) -> Self {
                num_traits::Float::powi(self, n)
            }
            fn is_finite(self) -> bool {
                num_traits::Float::is_finite(self)
            }
            fn sin_cos(self) -> (Self, Self) {
                num_traits::Float::sin_cos(self)
            }
        }
    };
}

impl_scalar_for_float!(f32);
impl_scalar_for_float!(f64);
