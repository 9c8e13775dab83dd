//! Scalar abstraction over plain `f64` and derivative-carrying numbers.
//!
//! Network forwards, basis evaluations, and PDE residuals are written once
//! against this trait and then run with `f64` (plain evaluation), [`Dual`]
//! (one tangent), or [`Jet`] (input derivatives to second order).
//!
//! [`Dual`]: super::Dual
//! [`Jet`]: super::Jet

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    fn constant(v: f64) -> Self;
    /// The underlying value, ignoring derivative slots.
    fn value(self) -> f64;
    /// Multiply by a plain constant (no derivative slots on the constant).
    fn scale(self, k: f64) -> Self;

    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tanh(self) -> Self;
    fn atanh(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, p: f64) -> Self;
    /// sin(x)/x with the removable singularity filled (see [`crate::bases::sinc`]).
    fn sinc(self) -> Self;

    fn zero() -> Self {
        Self::constant(0.0)
    }

    fn one() -> Self {
        Self::constant(1.0)
    }

    /// View a slice of Self as plain floats when Self carries no derivative
    /// slots. Kernels use this to take vectorized paths; the generic path
    /// computes the same formulas in the same order.
    #[inline]
    fn plain_slice(_buf: &[Self]) -> Option<&[f64]> {
        None
    }

    #[inline]
    fn plain_slice_mut(_buf: &mut [Self]) -> Option<&mut [f64]> {
        None
    }

    /// x * sigmoid(x). Saturated tails are clamped so the sigmoid's exp can
    /// never overflow into the derivative slots.
    fn silu(self) -> Self {
        let v = self.value();
        if v > 40.0 {
            self
        } else if v < -40.0 {
            Self::zero()
        } else {
            self / (Self::one() + (-self).exp())
        }
    }
}

impl Scalar for f64 {
    #[inline(always)]
    fn constant(v: f64) -> Self {
        v
    }

    #[inline(always)]
    fn plain_slice(buf: &[Self]) -> Option<&[f64]> {
        Some(buf)
    }

    #[inline(always)]
    fn plain_slice_mut(buf: &mut [Self]) -> Option<&mut [f64]> {
        Some(buf)
    }

    #[inline(always)]
    fn value(self) -> f64 {
        self
    }

    #[inline(always)]
    fn scale(self, k: f64) -> Self {
        self * k
    }

    #[inline(always)]
    fn exp(self) -> Self {
        f64::exp(self)
    }

    #[inline(always)]
    fn ln(self) -> Self {
        f64::ln(self)
    }

    #[inline(always)]
    fn sin(self) -> Self {
        f64::sin(self)
    }

    #[inline(always)]
    fn cos(self) -> Self {
        f64::cos(self)
    }

    #[inline(always)]
    fn tanh(self) -> Self {
        f64::tanh(self)
    }

    #[inline(always)]
    fn atanh(self) -> Self {
        f64::atanh(self)
    }

    #[inline(always)]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    #[inline(always)]
    fn abs(self) -> Self {
        f64::abs(self)
    }

    #[inline(always)]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }

    #[inline(always)]
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }

    #[inline(always)]
    fn sinc(self) -> Self {
        crate::bases::sinc(self)
    }
}
