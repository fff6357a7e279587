//! Field abstraction shared by the exact (rational) and floating (complex)
//! code paths.

use core::fmt::Debug;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::{One, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn from_rational(v: &BigRational) -> Self;
    fn to_complex(&self) -> Complex64;
    /// Exact comparison for exact fields, `|a - b| <= tol` otherwise.
    fn near(&self, other: &Self, tol: f64) -> bool;
    /// Complex conjugate (identity on rationals).
    fn conj(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inverse(&self) -> Option<Self>;
    fn is_exact() -> bool;
}

impl Scalar for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_rational(v: &BigRational) -> Self {
        Complex64::new(rational_to_f64(v), 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn near(&self, other: &Self, tol: f64) -> bool {
        (*self - *other).norm() <= tol
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / *self)
        }
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(v: &BigRational) -> Self {
        v.clone()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn is_exact() -> bool {
        true
    }
}

pub fn rational_to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Returns `v` as an `i64` when it is an integer that fits.
pub fn rational_to_integer(v: &BigRational) -> Option<i64> {
    if v.is_integer() {
        v.to_integer().to_i64()
    } else {
        None
    }
}

/// Complex number as a rational pair when both parts are exact integers.
pub fn complex_to_integer(z: Complex64) -> Option<i64> {
    if z.im == 0.0 && z.re.fract() == 0.0 && z.re.abs() < 9.0e15 {
        Some(z.re as i64)
    } else {
        None
    }
}
