//! Circulant matrices, stored as their defining first row.
//!
//! Row i is the first row cyclically shifted right i places, so the whole
//! matrix is determined by `first_row` and never needs to be materialized
//! for arithmetic: multiplying two circulants is cyclic convolution of
//! their rows.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::horadam::HoradamParams;
use crate::matrix::DenseMatrix;
use crate::rational::Rational;

pub const MIN_DIMENSION: usize = 3;

#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct Circulant {
    n: usize,
    first_row: Vec<Rational>,
}

impl Circulant {
    pub fn new(first_row: Vec<Rational>) -> Result<Self> {
        if first_row.is_empty() {
            return Err(Error::InvalidArgument(
                "circulant needs a nonempty first row".to_string(),
            ));
        }
        Ok(Circulant {
            n: first_row.len(),
            first_row,
        })
    }

    /// n×n circulant whose first row is W(1), W(2), …, W(n).
    pub fn from_params(params: &HoradamParams, n: usize) -> Result<Self> {
        if n < MIN_DIMENSION {
            return Err(Error::UnsupportedDimension {
                n,
                min: MIN_DIMENSION,
            });
        }
        let w = params.seq(n + 1);
        let first_row = w[1..=n].iter().map(Rational::from).collect();
        Circulant::new(first_row)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn first_row(&self) -> &[Rational] {
        &self.first_row
    }

    /// Entry (i, j) = first_row[(j − i) mod n].
    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        assert!(i < self.n && j < self.n, "index ({i},{j}) out of range");
        &self.first_row[(j + self.n - i) % self.n]
    }

    pub fn materialize(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self.entry(i, j).clone();
            }
        }
        m
    }

    /// Product of two circulants of the same size — cyclic convolution of
    /// the first rows, so the result is again circulant.
    pub fn conv_mul(&self, rhs: &Circulant) -> Result<Circulant> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: rhs.n,
            });
        }
        let n = self.n;
        let mut row = vec![Rational::zero(); n];
        for k in 0..n {
            if self.first_row[k].is_zero() {
                continue;
            }
            for l in 0..n {
                let prod = &self.first_row[k] * &rhs.first_row[l];
                row[(k + l) % n] += &prod;
            }
        }
        Circulant::new(row)
    }

    pub fn row_sum(&self) -> Rational {
        self.first_row.iter().sum()
    }

    /// Largest bit size over the entries, a proxy for how heavy exact
    /// arithmetic on this matrix will be.
    pub fn max_entry_bits(&self) -> u64 {
        self.first_row.iter().map(Rational::bit_size).max().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.first_row[0].is_one() && self.first_row[1..].iter().all(Rational::is_zero)
    }
}

impl fmt::Debug for Circulant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row: Vec<String> = self.first_row.iter().map(|x| x.to_string()).collect();
        write!(f, "circ({})", row.join(", "))
    }
}

impl<'de> Deserialize<'de> for Circulant {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            first_row: Vec<Rational>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.first_row.len() != raw.n {
            return Err(serde::de::Error::custom(format!(
                "first_row has {} entries but n = {}",
                raw.first_row.len(),
                raw.n
            )));
        }
        Circulant::new(raw.first_row).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horadam::Preset;

    fn circ(v: &[i64]) -> Circulant {
        Circulant::new(v.iter().map(|&x| Rational::from(x)).collect()).unwrap()
    }

    #[test]
    fn fibonacci_first_rows() {
        let c = Circulant::from_params(&Preset::Fibonacci.params(), 4).unwrap();
        assert_eq!(c.first_row(), circ(&[1, 1, 2, 3]).first_row());
        let c = Circulant::from_params(&Preset::Lucas.params(), 3).unwrap();
        assert_eq!(c.first_row(), circ(&[1, 3, 4]).first_row());
    }

    #[test]
    fn too_small_dimension_is_rejected() {
        let err = Circulant::from_params(&Preset::Fibonacci.params(), 2).unwrap_err();
        assert_eq!(err, Error::UnsupportedDimension { n: 2, min: 3 });
    }

    #[test]
    fn entries_shift_right_per_row() {
        let c = circ(&[1, 2, 3]);
        let m = c.materialize();
        // row 1 is row 0 shifted right once
        assert_eq!(m[(1, 0)], Rational::from(3));
        assert_eq!(m[(1, 1)], Rational::from(1));
        assert_eq!(m[(1, 2)], Rational::from(2));
        assert_eq!(m.as_circulant_first_row().unwrap(), c.first_row());
    }

    #[test]
    fn conv_mul_matches_dense_product() {
        let a = circ(&[1, 1, 2, 3]);
        let b = circ(&[2, 0, -1, 5]);
        let slow = a.materialize().mul(&b.materialize()).unwrap();
        let fast = a.conv_mul(&b).unwrap();
        assert_eq!(fast.materialize(), slow);
    }

    #[test]
    fn conv_mul_commutes() {
        let a = circ(&[1, 1, 2, 3]);
        let b = circ(&[2, 0, -1, 5]);
        assert_eq!(a.conv_mul(&b).unwrap(), b.conv_mul(&a).unwrap());
    }

    #[test]
    fn row_sum_and_bits() {
        let c = circ(&[1, 1, 2, 3]);
        assert_eq!(c.row_sum(), Rational::from(7));
        assert_eq!(c.max_entry_bits(), 2);
    }

    #[test]
    fn identity_detection() {
        assert!(circ(&[1, 0, 0]).is_identity());
        assert!(!circ(&[1, 0, 1]).is_identity());
    }

    #[test]
    fn serde_rejects_inconsistent_n() {
        let good: Circulant =
            serde_json::from_str(r#"{"n":3,"first_row":["1","1","2"]}"#).unwrap();
        assert_eq!(good, circ(&[1, 1, 2]));
        let bad = serde_json::from_str::<Circulant>(r#"{"n":4,"first_row":["1","1","2"]}"#);
        assert!(bad.is_err());
    }
}
