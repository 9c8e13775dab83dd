//! Forward-mode jets: a value with first and pure second partials per
//! tracked input dimension.
//!
//! Only pure second partials (u_xx, u_yy, u_tt) are carried; no in-scope
//! residual needs cross terms, and dropping them halves the jet width. Each
//! tracked dimension therefore propagates independently through the chain
//! rule, which is what makes the per-dimension arrays below sound.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use super::record_domain_event;
use super::scalar::Scalar;
use crate::bases::sinc_d012;

/// Value plus first and pure second partials w.r.t. `K` tracked inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const K: usize> {
    pub v: f64,
    pub d1: [f64; K],
    pub d2: [f64; K],
}

impl<const K: usize> Jet<K> {
    /// A constant: d1 = d2 = 0 exactly.
    #[inline]
    pub fn constant(v: f64) -> Self {
        Jet { v, d1: [0.0; K], d2: [0.0; K] }
    }

    /// An input variable seeded on tracked dimension `dim`.
    #[inline]
    pub fn variable(v: f64, dim: usize) -> Self {
        let mut d1 = [0.0; K];
        d1[dim] = 1.0;
        Jet { v, d1, d2: [0.0; K] }
    }

    /// Chain rule for a univariate primitive with value `f0` and first and
    /// second derivatives `f1`, `f2` at `self.v`.
    #[inline]
    pub(crate) fn lift(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut d1 = [0.0; K];
        let mut d2 = [0.0; K];
        for k in 0..K {
            d1[k] = f1 * self.d1[k];
            d2[k] = f2 * self.d1[k] * self.d1[k] + f1 * self.d2[k];
        }
        Jet { v: f0, d1, d2 }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.d1.iter().all(|d| d.is_finite())
            && self.d2.iter().all(|d| d.is_finite())
    }
}

impl<const K: usize> Add for Jet<K> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for k in 0..K {
            out.d1[k] += rhs.d1[k];
            out.d2[k] += rhs.d2[k];
        }
        out.v += rhs.v;
        out
    }
}

impl<const K: usize> AddAssign for Jet<K> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const K: usize> Sub for Jet<K> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for k in 0..K {
            out.d1[k] -= rhs.d1[k];
            out.d2[k] -= rhs.d2[k];
        }
        out.v -= rhs.v;
        out
    }
}

impl<const K: usize> Mul for Jet<K> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut d1 = [0.0; K];
        let mut d2 = [0.0; K];
        for k in 0..K {
            d1[k] = self.v * rhs.d1[k] + self.d1[k] * rhs.v;
            d2[k] = self.v * rhs.d2[k] + 2.0 * self.d1[k] * rhs.d1[k] + self.d2[k] * rhs.v;
        }
        Jet { v: self.v * rhs.v, d1, d2 }
    }
}

impl<const K: usize> Div for Jet<K> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        if rhs.v == 0.0 {
            record_domain_event("div", rhs.v);
        }
        let qv = self.v / rhs.v;
        let mut d1 = [0.0; K];
        let mut d2 = [0.0; K];
        for k in 0..K {
            d1[k] = (self.d1[k] - qv * rhs.d1[k]) / rhs.v;
            d2[k] = (self.d2[k] - 2.0 * d1[k] * rhs.d1[k] - qv * rhs.d2[k]) / rhs.v;
        }
        Jet { v: qv, d1, d2 }
    }
}

impl<const K: usize> Neg for Jet<K> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        let mut out = self;
        out.v = -out.v;
        for k in 0..K {
            out.d1[k] = -out.d1[k];
            out.d2[k] = -out.d2[k];
        }
        out
    }
}

impl<const K: usize> Scalar for Jet<K> {
    #[inline]
    fn constant(v: f64) -> Self {
        Jet::constant(v)
    }

    #[inline]
    fn value(self) -> f64 {
        self.v
    }

    #[inline]
    fn scale(self, k: f64) -> Self {
        let mut out = self;
        out.v *= k;
        for i in 0..K {
            out.d1[i] *= k;
            out.d2[i] *= k;
        }
        out
    }

    #[inline]
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.lift(e, e, e)
    }

    #[inline]
    fn ln(self) -> Self {
        if self.v <= 0.0 {
            record_domain_event("ln", self.v);
        }
        let inv = 1.0 / self.v;
        self.lift(self.v.ln(), inv, -inv * inv)
    }

    #[inline]
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.lift(s, c, -s)
    }

    #[inline]
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.lift(c, -s, -c)
    }

    #[inline]
    fn tanh(self) -> Self {
        let t = self.v.tanh();
        let sech2 = 1.0 - t * t;
        self.lift(t, sech2, -2.0 * t * sech2)
    }

    #[inline]
    fn atanh(self) -> Self {
        if self.v.abs() >= 1.0 {
            record_domain_event("atanh", self.v);
        }
        let w = 1.0 - self.v * self.v;
        self.lift(self.v.atanh(), 1.0 / w, 2.0 * self.v / (w * w))
    }

    #[inline]
    fn sqrt(self) -> Self {
        if self.v < 0.0 {
            record_domain_event("sqrt", self.v);
        }
        let r = self.v.sqrt();
        self.lift(r, 0.5 / r, -0.25 / (r * self.v))
    }

    /// Active-branch derivative; x = 0 takes the right-hand branch.
    #[inline]
    fn abs(self) -> Self {
        let s = if self.v < 0.0 { -1.0 } else { 1.0 };
        self.lift(self.v.abs(), s, 0.0)
    }

    #[inline]
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Jet::constant(1.0),
            1 => self,
            _ => {
                let p = f64::from(n);
                self.lift(
                    self.v.powi(n),
                    p * self.v.powi(n - 1),
                    p * (p - 1.0) * self.v.powi(n - 2),
                )
            }
        }
    }

    #[inline]
    fn powf(self, p: f64) -> Self {
        if p == 1.0 {
            return self;
        }
        self.lift(
            self.v.powf(p),
            p * self.v.powf(p - 1.0),
            p * (p - 1.0) * self.v.powf(p - 2.0),
        )
    }

    #[inline]
    fn sinc(self) -> Self {
        let (s0, s1, s2) = sinc_d012(self.v);
        self.lift(s0, s1, s2)
    }
}
