//! First-order dual numbers with a single tangent slot.
//!
//! Used where only one directional derivative is needed at a time, e.g.
//! differentiating a PDE residual with respect to one jet slot.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use super::scalar::Scalar;
use crate::bases::sinc_d012;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    #[inline]
    pub fn constant(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }

    /// Seeded variable with tangent 1.
    #[inline]
    pub fn variable(v: f64) -> Self {
        Dual { v, d: 1.0 }
    }

    #[inline]
    fn lift(self, f0: f64, f1: f64) -> Self {
        Dual { v: f0, d: f1 * self.d }
    }
}

impl Add for Dual {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Dual { v: self.v + rhs.v, d: self.d + rhs.d }
    }
}

impl AddAssign for Dual {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Dual {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Dual { v: self.v - rhs.v, d: self.d - rhs.d }
    }
}

impl Mul for Dual {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Dual { v: self.v * rhs.v, d: self.v * rhs.d + self.d * rhs.v }
    }
}

impl Div for Dual {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let q = self.v / rhs.v;
        Dual { v: q, d: (self.d - q * rhs.d) / rhs.v }
    }
}

impl Neg for Dual {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual { v: -self.v, d: -self.d }
    }
}

impl Scalar for Dual {
    #[inline]
    fn constant(v: f64) -> Self {
        Dual::constant(v)
    }

    #[inline]
    fn value(self) -> f64 {
        self.v
    }

    #[inline]
    fn scale(self, k: f64) -> Self {
        Dual { v: self.v * k, d: self.d * k }
    }

    #[inline]
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.lift(e, e)
    }

    #[inline]
    fn ln(self) -> Self {
        self.lift(self.v.ln(), 1.0 / self.v)
    }

    #[inline]
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.lift(s, c)
    }

    #[inline]
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.lift(c, -s)
    }

    #[inline]
    fn tanh(self) -> Self {
        let t = self.v.tanh();
        self.lift(t, 1.0 - t * t)
    }

    #[inline]
    fn atanh(self) -> Self {
        self.lift(self.v.atanh(), 1.0 / (1.0 - self.v * self.v))
    }

    #[inline]
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.lift(r, 0.5 / r)
    }

    #[inline]
    fn abs(self) -> Self {
        let s = if self.v < 0.0 { -1.0 } else { 1.0 };
        self.lift(self.v.abs(), s)
    }

    #[inline]
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Dual::constant(1.0),
            1 => self,
            _ => self.lift(self.v.powi(n), f64::from(n) * self.v.powi(n - 1)),
        }
    }

    #[inline]
    fn powf(self, p: f64) -> Self {
        if p == 1.0 {
            return self;
        }
        self.lift(self.v.powf(p), p * self.v.powf(p - 1.0))
    }

    #[inline]
    fn sinc(self) -> Self {
        let (s0, s1, _) = sinc_d012(self.v);
        self.lift(s0, s1)
    }
}
