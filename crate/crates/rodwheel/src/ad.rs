//! Forward-mode automatic differentiation scalars.
//!
//! [`AD2`] is a hyper-dual number: one value, two directional first
//! derivatives and the mixed second derivative along both directions. Seeding
//! a pair of inputs and evaluating a function once yields one exact Hessian
//! entry; the derivatives are propagated algebraically, never by differencing.
//!
//! [`Dual`] is the first-order tangent sibling. The Lagrangian machinery uses
//! it to differentiate positions with respect to time along a given velocity
//! (`d1`-channel only), nested inside an outer `AD2` pass over the inputs.
//! Both types are generic over [`Real`] so they can be stacked.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

/// Errors raised by checked scalar operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AdError {
    /// Division by a scalar whose value part is zero.
    #[error("division by a scalar with zero value part")]
    DivisionByZero,
}

/// Scalar abstraction shared by `f64`, [`Dual`] and [`AD2`].
///
/// Only what the Lagrangian needs: ring operations, division, sine and
/// cosine, plus lifting of `f64` constants.
pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    /// Plain value part, unwrapping nested derivative structure.
    fn value(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
}

impl Real for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
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
}

/// Hyper-dual scalar: value, two seeded first derivatives, mixed second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AD2<T = f64> {
    pub v: T,
    pub d1: T,
    pub d2: T,
    pub d12: T,
}

impl<T: Real> AD2<T> {
    #[inline]
    pub fn new(v: T, d1: T, d2: T, d12: T) -> Self {
        AD2 { v, d1, d2, d12 }
    }

    /// Lift a constant: all derivative channels zero.
    #[inline]
    pub fn constant(v: T) -> Self {
        AD2 {
            v,
            d1: T::zero(),
            d2: T::zero(),
            d12: T::zero(),
        }
    }

    /// Seed an input with directional components `d1`, `d2` (`d12 = 0`).
    #[inline]
    pub fn seeded(v: T, d1: T, d2: T) -> Self {
        AD2 {
            v,
            d1,
            d2,
            d12: T::zero(),
        }
    }

    /// Checked division; the divisor must have a nonzero value part.
    #[inline]
    pub fn try_div(self, rhs: Self) -> Result<Self, AdError> {
        if rhs.v.value() == 0.0 {
            return Err(AdError::DivisionByZero);
        }
        Ok(self / rhs)
    }

    #[inline]
    pub fn sin(self) -> Self {
        let s = self.v.sin();
        let c = self.v.cos();
        AD2 {
            v: s,
            d1: c * self.d1,
            d2: c * self.d2,
            d12: c * self.d12 - s * self.d1 * self.d2,
        }
    }

    #[inline]
    pub fn cos(self) -> Self {
        let s = self.v.sin();
        let c = self.v.cos();
        AD2 {
            v: c,
            d1: -(s * self.d1),
            d2: -(s * self.d2),
            d12: -(s * self.d12) - c * self.d1 * self.d2,
        }
    }
}

impl<T: Real> Add for AD2<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        AD2 {
            v: self.v + rhs.v,
            d1: self.d1 + rhs.d1,
            d2: self.d2 + rhs.d2,
            d12: self.d12 + rhs.d12,
        }
    }
}

impl<T: Real> Sub for AD2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        AD2 {
            v: self.v - rhs.v,
            d1: self.d1 - rhs.d1,
            d2: self.d2 - rhs.d2,
            d12: self.d12 - rhs.d12,
        }
    }
}

impl<T: Real> Mul for AD2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        AD2 {
            v: self.v * rhs.v,
            d1: self.d1 * rhs.v + self.v * rhs.d1,
            d2: self.d2 * rhs.v + self.v * rhs.d2,
            d12: self.d12 * rhs.v + self.d1 * rhs.d2 + self.d2 * rhs.d1 + self.v * rhs.d12,
        }
    }
}

impl<T: Real> Neg for AD2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        AD2 {
            v: -self.v,
            d1: -self.d1,
            d2: -self.d2,
            d12: -self.d12,
        }
    }
}

/// IEEE-flowing division (zero divisor propagates inf/NaN like `f64`).
/// Use [`AD2::try_div`] where the domain error must be surfaced.
impl<T: Real> Div for AD2<T> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let v = self.v / rhs.v;
        let d1 = (self.d1 - v * rhs.d1) / rhs.v;
        let d2 = (self.d2 - v * rhs.d2) / rhs.v;
        let d12 = (self.d12 - d1 * rhs.d2 - d2 * rhs.d1 - v * rhs.d12) / rhs.v;
        AD2 { v, d1, d2, d12 }
    }
}

impl<T: Real> Real for AD2<T> {
    #[inline]
    fn zero() -> Self {
        AD2::constant(T::zero())
    }
    #[inline]
    fn one() -> Self {
        AD2::constant(T::one())
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        AD2::constant(T::from_f64(x))
    }
    #[inline]
    fn value(self) -> f64 {
        self.v.value()
    }
    #[inline]
    fn sin(self) -> Self {
        AD2::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        AD2::cos(self)
    }
}

/// First-order tangent scalar: value plus one directional derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T = f64> {
    pub v: T,
    pub d: T,
}

impl<T: Real> Dual<T> {
    /// Lift a quantity together with its rate of change.
    #[inline]
    pub fn lift(v: T, d: T) -> Self {
        Dual { v, d }
    }

    #[inline]
    pub fn constant(v: T) -> Self {
        Dual { v, d: T::zero() }
    }

    #[inline]
    pub fn sin(self) -> Self {
        Dual {
            v: self.v.sin(),
            d: self.v.cos() * self.d,
        }
    }

    #[inline]
    pub fn cos(self) -> Self {
        Dual {
            v: self.v.cos(),
            d: -(self.v.sin() * self.d),
        }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Dual {
            v: self.v + rhs.v,
            d: self.d + rhs.d,
        }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Dual {
            v: self.v - rhs.v,
            d: self.d - rhs.d,
        }
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Dual {
            v: self.v * rhs.v,
            d: self.d * rhs.v + self.v * rhs.d,
        }
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual {
            v: -self.v,
            d: -self.d,
        }
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let v = self.v / rhs.v;
        Dual {
            v,
            d: (self.d - v * rhs.d) / rhs.v,
        }
    }
}

impl<T: Real> Real for Dual<T> {
    #[inline]
    fn zero() -> Self {
        Dual::constant(T::zero())
    }
    #[inline]
    fn one() -> Self {
        Dual::constant(T::one())
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        Dual::constant(T::from_f64(x))
    }
    #[inline]
    fn value(self) -> f64 {
        self.v.value()
    }
    #[inline]
    fn sin(self) -> Self {
        Dual::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        Dual::cos(self)
    }
}
