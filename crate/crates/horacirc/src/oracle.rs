//! Ground-truth computations the closed-form results are checked against.
//!
//! Two exact routes (fraction-free elimination for determinants,
//! Gauss–Jordan for inverses) and one floating route (direct O(n²) DFT,
//! deliberately not an FFT — the oracle should stay simple enough to trust
//! on sight). The exact and floating routes are independent of each other
//! and of every closed-form path in this crate.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::circulant::Circulant;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rational::Rational;

/// Relative eigenvalue-magnitude floor below which the DFT inverse refuses
/// to divide.
pub const DFT_SINGULARITY_THRESHOLD: f64 = 1e-12;

/// Exact determinant by Bareiss (fraction-free) elimination.
///
/// Rational input is handled by scaling each row to integers first and
/// dividing the scales back out at the end. Singular input returns 0; the
/// only error is a non-square matrix.
pub fn bareiss_det(m: &DenseMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Rational::one());
    }

    // clear denominators row by row, remembering the combined scale
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    let mut scale = BigInt::one();
    for i in 0..n {
        let lcm = m
            .row(i)
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let row = m
            .row(i)
            .iter()
            .map(|x| {
                let v = x * &Rational::from(&lcm);
                debug_assert!(v.is_integer());
                v.numer().clone()
            })
            .collect();
        a.push(row);
        scale *= lcm;
    }

    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(Rational::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                let (quo, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[i][j] = quo;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }

    let det = &a[n - 1][n - 1] * BigInt::from(sign);
    Rational::new(det, scale)
}

/// Exact inverse by Gauss–Jordan elimination with the first nonzero pivot
/// in each column (deterministic, no magnitude heuristics — entries are
/// exact, so any nonzero pivot is as good as another).
pub fn gauss_inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = DenseMatrix::identity(n);

    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[(r, col)].is_zero())
            .ok_or(Error::Singular)?;
        if pivot_row != col {
            for j in 0..n {
                let tmp = a[(col, j)].clone();
                a[(col, j)] = a[(pivot_row, j)].clone();
                a[(pivot_row, j)] = tmp;
                let tmp = inv[(col, j)].clone();
                inv[(col, j)] = inv[(pivot_row, j)].clone();
                inv[(pivot_row, j)] = tmp;
            }
        }
        let pivot = a[(col, col)].clone();
        let pivot_inv = pivot.recip()?;
        for j in 0..n {
            a[(col, j)] = &a[(col, j)] * &pivot_inv;
            inv[(col, j)] = &inv[(col, j)] * &pivot_inv;
        }
        for row in 0..n {
            if row == col || a[(row, col)].is_zero() {
                continue;
            }
            let factor = a[(row, col)].clone();
            for j in 0..n {
                let t = &factor * &a[(col, j)];
                a[(row, j)] -= &t;
                let t = &factor * &inv[(col, j)];
                inv[(row, j)] -= &t;
            }
        }
    }
    Ok(inv)
}

/// λ_j = Σ_k c_k ω^{jk} with ω = exp(2πi/n), evaluated directly.
///
/// The exponent is reduced mod n before the trig call so large j·k
/// products cost no precision.
pub fn dft_eigenvalues(c: &Circulant) -> Vec<Complex64> {
    let n = c.n();
    let row: Vec<f64> = c.first_row().iter().map(Rational::to_f64).collect();
    let step = 2.0 * std::f64::consts::PI / n as f64;
    (0..n)
        .map(|j| {
            let mut lambda = Complex64::new(0.0, 0.0);
            for (k, ck) in row.iter().enumerate() {
                let angle = step * ((j * k) % n) as f64;
                lambda += ck * Complex64::from_polar(1.0, angle);
            }
            lambda
        })
        .collect()
}

/// det = ∏_j λ_j. Imaginary part of the result is rounding noise for real
/// input.
pub fn dft_det(c: &Circulant) -> Complex64 {
    dft_eigenvalues(c)
        .into_iter()
        .fold(Complex64::new(1.0, 0.0), |acc, l| acc * l)
}

/// First row of the inverse: a_k = (1/n) Σ_j λ_j⁻¹ ω^{−jk}.
///
/// Eigenvalues with magnitude below `threshold · max|λ|` make the division
/// meaningless; that is reported, with the offending index, rather than
/// silently amplified.
pub fn dft_inverse_with_threshold(c: &Circulant, threshold: f64) -> Result<Vec<Complex64>> {
    let n = c.n();
    let lambdas = dft_eigenvalues(c);
    let max_mag = lambdas.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let floor = threshold * max_mag;
    for (j, l) in lambdas.iter().enumerate() {
        if l.norm() <= floor {
            return Err(Error::NumericallySingular {
                index: j,
                magnitude: l.norm(),
                threshold: floor,
            });
        }
    }
    let recip: Vec<Complex64> = lambdas.iter().map(|l| l.inv()).collect();
    let step = 2.0 * std::f64::consts::PI / n as f64;
    Ok((0..n)
        .map(|k| {
            let mut ak = Complex64::new(0.0, 0.0);
            for (j, lj) in recip.iter().enumerate() {
                let angle = -step * ((j * k) % n) as f64;
                ak += lj * Complex64::from_polar(1.0, angle);
            }
            ak / n as f64
        })
        .collect())
}

pub fn dft_inverse(c: &Circulant) -> Result<Vec<Complex64>> {
    dft_inverse_with_threshold(c, DFT_SINGULARITY_THRESHOLD)
}

/// Helper for comparing a float determinant against an exact one without
/// leaving the representable range: compares log-magnitudes and signs.
pub fn float_matches_exact(float: Complex64, exact: &Rational, rel_tol: f64) -> bool {
    let mag = float.norm();
    if exact.is_zero() {
        return mag < rel_tol;
    }
    match exact.log2_abs() {
        None => mag < rel_tol,
        Some(expect_log2) => {
            if mag == 0.0 || !mag.is_finite() {
                return false;
            }
            let got_log2 = mag.log2();
            let sign_ok = float.re.signum() == if exact.is_negative() { -1.0 } else { 1.0 };
            // |log ratio| < log(1 + tol) ≈ tol for small tol
            sign_ok && ((got_log2 - expect_log2) * std::f64::consts::LN_2).abs() < rel_tol
        }
    }
}
