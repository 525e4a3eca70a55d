//! Slow reference computations used only by tests.
//!
//! These deliberately share no code with the production paths: the naive
//! determinant is cofactor (Laplace) expansion, exponential but written in
//! five lines that can be checked by eye. Fine for n ≤ 8.

use crate::matrix::DenseMatrix;
use crate::rational::Rational;

pub(crate) fn naive_det(m: &DenseMatrix) -> Rational {
    assert!(m.is_square());
    let n = m.rows();
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return m[(0, 0)].clone();
    }
    let mut det = Rational::zero();
    for j in 0..n {
        if m[(0, j)].is_zero() {
            continue;
        }
        // minor of (0, j)
        let mut minor = DenseMatrix::zeros(n - 1, n - 1);
        for i in 1..n {
            let mut jj = 0;
            for k in 0..n {
                if k == j {
                    continue;
                }
                minor[(i - 1, jj)] = m[(i, k)].clone();
                jj += 1;
            }
        }
        let term = &m[(0, j)] * &naive_det(&minor);
        if j % 2 == 0 {
            det += &term;
        } else {
            det -= &term;
        }
    }
    det
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
    fn hand_checked_values() {
        assert_eq!(naive_det(&DenseMatrix::identity(4)), Rational::one());
        assert_eq!(naive_det(&m(&[&[2, 1], &[7, 4]])), Rational::from(1));
        assert_eq!(
            naive_det(&m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]])),
            Rational::from(-3)
        );
        // singular: repeated row
        assert_eq!(
            naive_det(&m(&[&[1, 2, 3], &[1, 2, 3], &[7, 8, 10]])),
            Rational::zero()
        );
    }
}
