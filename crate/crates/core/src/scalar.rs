//! Coefficient field abstraction.
//!
//! Every algorithm in this crate only needs exact field operations and an
//! exact zero test, so the engine is written against [`Field`] and the crate
//! root fixes the concrete instantiation to [`num_rational::BigRational`].
//! Floating types satisfy the trait bounds but are not meaningful here: rank
//! and valuation decisions compare coefficients against zero exactly.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{FromPrimitive, One, Zero};

/// A commutative field with exact equality.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + FromPrimitive
    + FromStr
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer is representable in the field")
    }

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }

    /// `self * b`, borrowing both operands.
    fn mul_ref(&self, b: &Self) -> Self {
        self.clone() * b.clone()
    }
}

impl<T> Field for T where
    T: Clone
        + Debug
        + PartialEq
        + Zero
        + One
        + FromPrimitive
        + FromStr
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Send
        + Sync
{
}

/// `dst -= factor * src`, elementwise over the common prefix.
pub(crate) fn axpy_neg<S: Field>(dst: &mut [S], factor: &S, src: &[S]) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            let prod = factor.mul_ref(s);
            *d = std::mem::replace(d, S::zero()) - prod;
        }
    }
}
