//! Generic scalar arithmetic shared by every phase-space formula.
//!
//! All geometric and dynamical expressions in this crate are written once,
//! generic over [`Scalar`], so the same code path evaluates with plain `f64`
//! or with [`Dual`] numbers. Seeding a `Dual` in one slot of a state vector
//! yields the exact partial derivative of any downstream quantity.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic interface required by the curvature-trigonometric functions and
/// everything built on top of them.
///
/// Branch decisions (series switchover, chart validation) are always made on
/// the primal [`Scalar::value`], never on derivative parts.
pub trait Scalar:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;

    /// Primal (value) part.
    fn value(self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tan(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    /// Multiply by a plain constant.
    fn scale(self, c: f64) -> Self {
        self * Self::from_f64(c)
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }

    #[inline]
    fn value(self) -> f64 {
        self
    }

    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }

    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }

    #[inline]
    fn sinh(self) -> Self {
        f64::sinh(self)
    }

    #[inline]
    fn cosh(self) -> Self {
        f64::cosh(self)
    }

    #[inline]
    fn tan(self) -> Self {
        f64::tan(self)
    }
}

/// Forward-mode dual number `v + ε d` with `ε² = 0`.
///
/// Carries one directional derivative alongside the value. Exact to rounding:
/// no truncation error, unlike finite differences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    /// Value part.
    pub v: f64,
    /// Derivative part.
    pub d: f64,
}

impl Dual {
    #[inline]
    pub fn new(v: f64, d: f64) -> Self {
        Self { v, d }
    }

    /// Constant: derivative part zero.
    #[inline]
    pub fn constant(v: f64) -> Self {
        Self { v, d: 0.0 }
    }

    /// Seed variable: unit derivative part.
    #[inline]
    pub fn variable(v: f64) -> Self {
        Self { v, d: 1.0 }
    }
}

impl Add for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, rhs: Dual) -> Dual {
        Dual::new(self.v + rhs.v, self.d + rhs.d)
    }
}

impl Sub for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, rhs: Dual) -> Dual {
        Dual::new(self.v - rhs.v, self.d - rhs.d)
    }
}

impl Mul for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, rhs: Dual) -> Dual {
        Dual::new(self.v * rhs.v, self.v * rhs.d + self.d * rhs.v)
    }
}

impl Div for Dual {
    type Output = Dual;
    #[inline]
    fn div(self, rhs: Dual) -> Dual {
        Dual::new(self.v / rhs.v, (self.d * rhs.v - self.v * rhs.d) / (rhs.v * rhs.v))
    }
}

impl Neg for Dual {
    type Output = Dual;
    #[inline]
    fn neg(self) -> Dual {
        Dual::new(-self.v, -self.d)
    }
}

impl Scalar for Dual {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Dual::constant(x)
    }

    #[inline]
    fn value(self) -> f64 {
        self.v
    }

    #[inline]
    fn sin(self) -> Self {
        Dual::new(self.v.sin(), self.d * self.v.cos())
    }

    #[inline]
    fn cos(self) -> Self {
        Dual::new(self.v.cos(), -self.d * self.v.sin())
    }

    #[inline]
    fn sinh(self) -> Self {
        Dual::new(self.v.sinh(), self.d * self.v.cosh())
    }

    #[inline]
    fn cosh(self) -> Self {
        Dual::new(self.v.cosh(), self.d * self.v.sinh())
    }

    #[inline]
    fn tan(self) -> Self {
        let c = self.v.cos();
        Dual::new(self.v.tan(), self.d / (c * c))
    }
}

/// Lift an `f64` slice into any scalar type as constants.
pub fn lift<S: Scalar>(xs: &[f64]) -> Vec<S> {
    xs.iter().map(|&x| S::from_f64(x)).collect()
}
