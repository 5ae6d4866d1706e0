//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar the library is generic over: `f32` or `f64`.
///
/// The algebraic tolerance is the threshold used for identities that hold
/// exactly in real arithmetic (normalization of a spectrum, Hermiticity).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Tolerance for identities that are exact in real arithmetic.
    const ALGEBRAIC_TOL: f64;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion of an index or count.
    #[inline]
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn algebraic_tol() -> Self {
        Self::of(Self::ALGEBRAIC_TOL)
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::of(2.0)
    }
}

impl Real for f32 {
    const ALGEBRAIC_TOL: f64 = 1e-5;
}

impl Real for f64 {
    const ALGEBRAIC_TOL: f64 = 1e-12;
}

/// `x·log₂x` with the convention `0·log₂0 = 0`; inputs below `1e-300` count as zero.
#[inline]
pub fn xlog2x<T: Real>(x: T) -> T {
    if x.to_f64_lossy() < 1e-300 {
        T::zero()
    } else {
        x * x.log2()
    }
}

/// Binary entropy `H₂(p)` in bits.
#[inline]
pub fn binary_entropy<T: Real>(p: T) -> T {
    -(xlog2x(p) + xlog2x(T::one() - p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xlog2x_zero_convention() {
        assert_eq!(xlog2x(0.0_f64), 0.0);
        assert_eq!(xlog2x(1e-301_f64), 0.0);
        assert_eq!(xlog2x(1.0_f64), 0.0);
        assert!((xlog2x(0.5_f64) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn binary_entropy_peaks_at_half() {
        assert!((binary_entropy(0.5_f64) - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0_f64), 0.0);
        assert!((binary_entropy(0.5_f32) - 1.0).abs() < 1e-6);
    }
}
