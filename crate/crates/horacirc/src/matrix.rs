//! Dense matrices over exact rationals.
//!
//! Row-major storage, sized for the n ≤ a-few-hundred range this crate works
//! in. Nothing here is tuned for sparsity — the point is exactness and
//! obviousness, not speed.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let n = entries.len();
        let mut m = DenseMatrix::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument(
                "rows have unequal lengths".to_string(),
            ));
        }
        Ok(DenseMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: rhs.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    out[(i, j)] += &prod;
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Block-diagonal concatenation: `self ⊕ other`.
    pub fn direct_sum(&self, other: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    /// Position and values of the first entry (row-major order) where the
    /// two matrices differ. `None` means they are equal.
    pub fn first_difference(
        &self,
        other: &DenseMatrix,
    ) -> Option<(usize, usize, Rational, Rational)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((0, 0, Rational::zero(), Rational::zero()));
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self[(i, j)] != other[(i, j)] {
                    return Some((i, j, self[(i, j)].clone(), other[(i, j)].clone()));
                }
            }
        }
        None
    }

    /// Interpret the matrix as a circulant and return its defining first
    /// row, checking that every row is the single right-shift of the row
    /// above it.
    pub fn as_circulant_first_row(&self) -> Option<Vec<Rational>> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let n = self.rows;
        for i in 1..n {
            for j in 0..n {
                if self[(i, j)] != self[(i - 1, (j + n - 1) % n)] {
                    return None;
                }
            }
        }
        Some(self.row(0).to_vec())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // column-aligned plain text
        let mut widths = vec![0usize; self.cols];
        let mut cells = Vec::with_capacity(self.rows * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let s = self[(i, j)].to_string();
                widths[j] = widths[j].max(s.len());
                cells.push(s);
            }
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{:>width$}", cells[i * self.cols + j], width = widths[j])?;
            }
            if i + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> DenseMatrix {
        DenseMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn multiply_small() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[5, 6], &[7, 8]]);
        assert_eq!(a.mul(&b).unwrap(), m(&[&[19, 22], &[43, 50]]));
    }

    #[test]
    fn multiply_dimension_mismatch() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[1, 2, 3]]);
        assert_eq!(
            a.mul(&b),
            Err(Error::DimensionMismatch { left: 2, right: 1 })
        );
    }

    #[test]
    fn identity_is_neutral() {
        let a = m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let id = DenseMatrix::identity(3);
        assert_eq!(a.mul(&id).unwrap(), a);
        assert_eq!(id.mul(&a).unwrap(), a);
        assert!(id.is_identity());
        assert!(!a.is_identity());
    }

    #[test]
    fn transpose_involution() {
        let a = m(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose()[(2, 1)], Rational::from(6));
    }

    #[test]
    fn direct_sum_blocks() {
        let a = m(&[&[1]]);
        let b = m(&[&[2, 3], &[4, 5]]);
        let s = a.direct_sum(&b);
        assert_eq!(s, m(&[&[1, 0, 0], &[0, 2, 3], &[0, 4, 5]]));
    }

    #[test]
    fn first_difference_pinpoints() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let mut b = a.clone();
        assert_eq!(a.first_difference(&b), None);
        b[(1, 0)] = Rational::from(9);
        let (i, j, got, want) = a.first_difference(&b).unwrap();
        assert_eq!((i, j), (1, 0));
        assert_eq!(got, Rational::from(3));
        assert_eq!(want, Rational::from(9));
    }

    #[test]
    fn circulant_recognition() {
        let c = m(&[&[1, 2, 3], &[3, 1, 2], &[2, 3, 1]]);
        assert_eq!(
            c.as_circulant_first_row().unwrap(),
            vec![Rational::from(1), Rational::from(2), Rational::from(3)]
        );
        let not_c = m(&[&[1, 2, 3], &[3, 1, 2], &[2, 3, 2]]);
        assert_eq!(not_c.as_circulant_first_row(), None);
    }
}
