//! Arithmetic in the quadratic extension field Q(√D).
//!
//! Elements are stored as `u + v·√D` with exact rational coordinates. All
//! arithmetic stays symbolic, so √D never needs to exist as a float; a value
//! only leaves the extension through [`QuadExt::demote`], which succeeds
//! exactly when the √D part has cancelled.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct QuadExt {
    u: Rational,
    v: Rational,
    d: BigInt,
}

impl QuadExt {
    /// `u + v·√d`. The discriminant tags the value; mixing tags is an error.
    pub fn new(u: Rational, v: Rational, d: BigInt) -> Self {
        QuadExt { u, v, d }
    }

    pub fn from_rational(u: Rational, d: BigInt) -> Self {
        QuadExt::new(u, Rational::zero(), d)
    }

    /// √d itself.
    pub fn root(d: BigInt) -> Self {
        QuadExt::new(Rational::zero(), Rational::one(), d)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.u
    }

    pub fn root_part(&self) -> &Rational {
        &self.v
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    fn check_same(&self, rhs: &Self) -> Result<()> {
        if self.d != rhs.d {
            return Err(Error::MismatchedDiscriminants {
                left: self.d.clone(),
                right: rhs.d.clone(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        Ok(QuadExt::new(&self.u + &rhs.u, &self.v + &rhs.v, self.d.clone()))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        Ok(QuadExt::new(&self.u - &rhs.u, &self.v - &rhs.v, self.d.clone()))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        let d = Rational::from(&self.d);
        // (u1 + v1√D)(u2 + v2√D) = u1u2 + v1v2·D + (u1v2 + v1u2)√D
        let u = &(&self.u * &rhs.u) + &(&(&self.v * &rhs.v) * &d);
        let v = &(&self.u * &rhs.v) + &(&self.v * &rhs.u);
        Ok(QuadExt::new(u, v, self.d.clone()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        let n = rhs.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // multiply by the conjugate, divide by the (rational) norm
        let num = self.checked_mul(&rhs.conjugate())?;
        Ok(QuadExt::new(
            num.u.checked_div(&n)?,
            num.v.checked_div(&n)?,
            self.d.clone(),
        ))
    }

    pub fn conjugate(&self) -> Self {
        QuadExt::new(self.u.clone(), -&self.v, self.d.clone())
    }

    /// Field norm N(u + v√D) = u² − v²·D; rational, zero iff the element is
    /// zero (for non-square D).
    pub fn norm(&self) -> Rational {
        &(&self.u * &self.u) - &(&(&self.v * &self.v) * &Rational::from(&self.d))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QuadExt::new(&self.u * c, &self.v * c, self.d.clone())
    }

    pub fn pow(&self, exp: usize) -> Self {
        let mut base = self.clone();
        let mut e = exp;
        let mut acc = QuadExt::from_rational(Rational::one(), self.d.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base).expect("same discriminant");
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base).expect("same discriminant");
            }
        }
        acc
    }

    /// Collapse to a plain rational.
    ///
    /// Succeeds when the √D coefficient is zero, or when D is a perfect
    /// square (so √D is itself an integer). A nonzero √D part over a
    /// non-square D cannot be represented and is reported as an error.
    pub fn demote(&self) -> Result<Rational> {
        if self.v.is_zero() {
            return Ok(self.u.clone());
        }
        if self.d.is_negative() {
            return Err(Error::IrrationalResidue { d: self.d.clone() });
        }
        let r = self.d.sqrt();
        if &r * &r == self.d {
            return Ok(&self.u + &(&self.v * &Rational::from(r)));
        }
        Err(Error::IrrationalResidue { d: self.d.clone() })
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.u, self.v, self.d)
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("QuadExt", 3)?;
        s.serialize_field("u", &self.u)?;
        s.serialize_field("v", &self.v)?;
        s.serialize_field("D", &self.d.to_i64())?;
        s.end()
    }
}
