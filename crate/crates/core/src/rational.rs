//! Exact rationals over arbitrary-precision integers.
//!
//! [`Rational`] wraps `num_rational::BigRational`, which reduces on every
//! construction, so two equal values always share one representation and
//! `==` is structural. The text form is `<num>/<den>` with a positive
//! denominator, always printed even when it is 1.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Result<Self, Error> {
        if denom == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom.into())))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Result<Self, Error> {
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn integer(v: i64) -> Self {
        Rational(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `1 / d`; panics on zero, so only for literal constants.
    pub(crate) fn recip_of(d: i64) -> Self {
        Rational::new(1, d).expect("nonzero literal denominator")
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, Error> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Rational, Error> {
        Rational::one().checked_div(self)
    }

    pub fn pow(&self, exp: i32) -> Result<Rational, Error> {
        if exp < 0 && self.is_zero() {
            return Err(Error::ZeroToNegativePower);
        }
        Ok(Rational(num_traits::Pow::pow(&self.0, exp)))
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn min<'a>(&'a self, other: &'a Rational) -> &'a Rational {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max<'a>(&'a self, other: &'a Rational) -> &'a Rational {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Nearest `f64`; saturates to ±inf for values outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(v: f64) -> Result<Rational, Error> {
        BigRational::from_float(v)
            .map(Rational)
            .ok_or_else(|| Error::Parse(v.to_string()))
    }

    pub fn cmp_value(&self, other: &Rational) -> Ordering {
        self.cmp(other)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `a/b` or a bare integer `a`, with optional surrounding spaces.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Parse(String::from(s));
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        Rational::from_bigints(num, den)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::integer(v)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational(BigRational::from_integer(v))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl core::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> core::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Shorthand for literal fractions in tests and constants.
pub fn r(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom).expect("nonzero denominator")
}
