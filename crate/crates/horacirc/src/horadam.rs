//! Second-order linear recurrences W(0)=a, W(1)=b, W(k) = p·W(k−1) + q·W(k−2).
//!
//! The classical sequences are one parameter choice away: Fibonacci is
//! (0,1;1,1), Lucas (2,1;1,1), Pell (0,1;2,1), Pell–Lucas (2,2;2,1). Terms
//! can be produced either by running the recurrence or through the
//! closed-form root expression; the two must agree, and the test suite pins
//! that down.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::QuadExt;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HoradamParams {
    pub a: BigInt,
    pub b: BigInt,
    pub p: BigInt,
    pub q: BigInt,
}

// serialized as decimal strings: {"a":"0","b":"1","p":"1","q":"1"}
impl Serialize for HoradamParams {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("HoradamParams", 4)?;
        s.serialize_field("a", &self.a.to_string())?;
        s.serialize_field("b", &self.b.to_string())?;
        s.serialize_field("p", &self.p.to_string())?;
        s.serialize_field("q", &self.q.to_string())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for HoradamParams {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: String,
            b: String,
            p: String,
            q: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        let parse = |field: &str, s: &String| {
            s.parse::<BigInt>()
                .map_err(|_| serde::de::Error::custom(format!("{field}: not an integer: {s:?}")))
        };
        Ok(HoradamParams {
            a: parse("a", &raw.a)?,
            b: parse("b", &raw.b)?,
            p: parse("p", &raw.p)?,
            q: parse("q", &raw.q)?,
        })
    }
}

impl HoradamParams {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
    ) -> Self {
        HoradamParams {
            a: a.into(),
            b: b.into(),
            p: p.into(),
            q: q.into(),
        }
    }

    /// Characteristic discriminant p² + 4q of x² − px − q.
    pub fn discriminant(&self) -> BigInt {
        &self.p * &self.p + BigInt::from(4) * &self.q
    }

    /// First `len` terms W(0..len) by the recurrence.
    pub fn seq(&self, len: usize) -> Vec<BigInt> {
        let mut w = Vec::with_capacity(len);
        if len > 0 {
            w.push(self.a.clone());
        }
        if len > 1 {
            w.push(self.b.clone());
        }
        for k in 2..len {
            let next = &self.p * &w[k - 1] + &self.q * &w[k - 2];
            w.push(next);
        }
        w
    }

    /// W(n) through the characteristic roots α, β = (p ± √D)/2:
    ///
    ///   W(n) = (A·αⁿ − B·βⁿ) / (α − β),  A = b − a·β,  B = b − a·α.
    ///
    /// All arithmetic runs in Q(√D), so the result is exact; the √D parts
    /// must cancel, and a repeated root (D = 0) is reported rather than
    /// divided through.
    pub fn binet(&self, n: usize) -> Result<BigInt> {
        let d = self.discriminant();
        if d.is_zero() {
            return Err(Error::RepeatedRoot);
        }
        let half = Rational::new(1, 2)?;
        let p = QuadExt::from_rational(Rational::from(&self.p), d.clone());
        let root = QuadExt::root(d.clone());
        let alpha = p.checked_add(&root)?.scale(&half);
        let beta = p.checked_sub(&root)?.scale(&half);

        let a = QuadExt::from_rational(Rational::from(&self.a), d.clone());
        let b = QuadExt::from_rational(Rational::from(&self.b), d.clone());
        let big_a = b.checked_sub(&a.checked_mul(&beta)?)?;
        let big_b = b.checked_sub(&a.checked_mul(&alpha)?)?;

        let num = big_a
            .checked_mul(&alpha.pow(n))?
            .checked_sub(&big_b.checked_mul(&beta.pow(n))?)?;
        let den = alpha.checked_sub(&beta)?;
        let w = num.checked_div(&den)?.demote()?;
        debug_assert!(w.is_integer(), "root parts must cancel to an integer");
        Ok(w.numer().clone())
    }
}

impl fmt::Display for HoradamParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W(a={}, b={}; p={}, q={})", self.a, self.b, self.p, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Fibonacci,
    Lucas,
    Pell,
    PellLucas,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Fibonacci,
        Preset::Lucas,
        Preset::Pell,
        Preset::PellLucas,
    ];

    pub fn params(self) -> HoradamParams {
        let (a, b, p, q) = self.raw();
        HoradamParams::new(a, b, p, q)
    }

    /// The defining (a, b, p, q) as plain machine integers.
    pub fn raw(self) -> (i64, i64, i64, i64) {
        match self {
            Preset::Fibonacci => (0, 1, 1, 1),
            Preset::Lucas => (2, 1, 1, 1),
            Preset::Pell => (0, 1, 2, 1),
            Preset::PellLucas => (2, 2, 2, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fibonacci => "fibonacci",
            Preset::Lucas => "lucas",
            Preset::Pell => "pell",
            Preset::PellLucas => "pell-lucas",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fibonacci" | "fib" => Ok(Preset::Fibonacci),
            "lucas" => Ok(Preset::Lucas),
            "pell" => Ok(Preset::Pell),
            "pell-lucas" | "pell_lucas" | "pelllucas" => Ok(Preset::PellLucas),
            _ => Err(Error::InvalidArgument(format!("unknown preset: {s:?}"))),
        }
    }
}
