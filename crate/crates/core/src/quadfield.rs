//! Elements x + y·√s of a real quadratic field with squarefree radicand s.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadNumber {
    pub rational: BigRational,
    pub irrational: BigRational,
    pub radicand: BigInt,
}

impl QuadNumber {
    pub fn new(rational: BigRational, irrational: BigRational, radicand: BigInt) -> Self {
        Self {
            rational,
            irrational,
            radicand,
        }
    }

    pub fn from_rational(x: BigRational, radicand: &BigInt) -> Self {
        Self::new(x, BigRational::zero(), radicand.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.irrational.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.rational.clone(), -&self.irrational, self.radicand.clone())
    }

    /// x² - s·y².
    pub fn norm(&self) -> BigRational {
        &self.rational * &self.rational
            - &self.irrational * &self.irrational * BigRational::from_integer(self.radicand.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.radicand, other.radicand);
        Self::new(
            &self.rational + &other.rational,
            &self.irrational + &other.irrational,
            self.radicand.clone(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.radicand, other.radicand);
        Self::new(
            &self.rational - &other.rational,
            &self.irrational - &other.irrational,
            self.radicand.clone(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.radicand, other.radicand);
        let s = BigRational::from_integer(self.radicand.clone());
        Self::new(
            &self.rational * &other.rational + &self.irrational * &other.irrational * s,
            &self.rational * &other.irrational + &self.irrational * &other.rational,
            self.radicand.clone(),
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(&self.rational * c, &self.irrational * c, self.radicand.clone())
    }

    /// Division; panics on zero divisor.
    pub fn div(&self, other: &Self) -> Self {
        let n = other.norm();
        assert!(!n.is_zero(), "division by zero in quadratic field");
        self.mul(&other.conjugate()).scale(&n.recip())
    }

    /// Exact sign: compares x² with s·y².
    pub fn signum(&self) -> i32 {
        let sx = sign_of(&self.rational);
        let sy = sign_of(&self.irrational);
        if sx == sy || sy == 0 {
            return sx;
        }
        if sx == 0 {
            return sy;
        }
        // opposite signs: the larger magnitude wins
        let x2 = &self.rational * &self.rational;
        let sy2 = &self.irrational * &self.irrational * BigRational::from_integer(self.radicand.clone());
        if x2 > sy2 {
            sx
        } else if x2 < sy2 {
            sy
        } else {
            0
        }
    }

    pub fn to_f64(&self) -> f64 {
        let s = self.radicand.to_f64().unwrap_or(f64::NAN).sqrt();
        rat_to_f64(&self.rational) + rat_to_f64(&self.irrational) * s
    }

    /// Whether `self` is a root of x² - trace·x + norm.
    pub fn is_root_of(&self, trace: &BigRational, norm: &BigRational) -> bool {
        let one = Self::from_rational(BigRational::one(), &self.radicand);
        let lin = self.mul(&one.scale(trace));
        let val = self.mul(self).sub(&lin).add(&Self::from_rational(norm.clone(), &self.radicand));
        val.rational.is_zero() && val.irrational.is_zero()
    }
}

fn sign_of(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub(crate) fn rat_to_f64(x: &BigRational) -> f64 {
    let n = x.numer().to_f64().unwrap_or(f64::NAN);
    let d = x.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        return n / d;
    }
    // scale both down to keep the quotient finite
    let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
    let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

impl fmt::Display for QuadNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irrational.is_zero() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{} + ({})*sqrt({})", self.rational, self.irrational, self.radicand)
        }
    }
}
