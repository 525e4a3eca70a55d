//! Scalar closed forms for circ(W₁, …, W_n): the direct determinant
//! expression, the Hessenberg reduction scalars g_n / g′_n that give the
//! determinant a second, independent route, and the inverse of the lower
//! bidiagonal block that appears in the structured inverse.
//!
//! The bidiagonal inverse ships in two variants: the sign-corrected one
//! used by production code, and the as-printed one kept only so the audit
//! can quantify how the printed entries fail.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::horadam::HoradamParams;
use crate::matrix::DenseMatrix;
use crate::rational::Rational;

/// Quantities from the Hessenberg reduction of circ(W₁, …, W_n):
///
/// * `diag` = W₁ − W_{n+1} and `sub` = q(W₀ − W_n) — the constant diagonal
///   and subdiagonal of the reduced matrix below its first two rows;
/// * `gn` — the (1,1) entry of the reduced matrix, which carries the whole
///   determinant: det = W₁ · diag^{n−2} · gn;
/// * `gn_prime` — the (0,1) entry, needed by the inverse assembly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HessenbergScalars {
    pub gn: Rational,
    pub gn_prime: Rational,
    pub diag: Rational,
    pub sub: Rational,
}

impl HessenbergScalars {
    /// ρ = q(W_n − W₀)/(W₁ − W_{n+1}) = −sub/diag, the geometric ratio the
    /// reduction propagates down column 1.
    pub fn rho(&self) -> Rational {
        (-&self.sub) / &self.diag
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::UnsupportedDimension { n, min: 3 });
    }
    Ok(())
}

/// Exact determinant of circ(W₁, …, W_n) by the direct closed form
///
///   (b² − W₂W_n)(b − W_{n+1})^{n−2}
///     + Σ_{k=2}^{n−1} (bW_{k+1} − W₂W_k)(b − W_{n+1})^{k−2} (qW_n − qa)^{n−k}
///
/// evaluated with Horner-style accumulation so the whole sum costs O(n)
/// big-number multiplications. Contains no division, so it is defined for
/// every parameter choice (0⁰ = 1 where a base vanishes).
pub fn det_eq3(params: &HoradamParams, n: usize) -> Result<Rational> {
    check_dimension(n)?;
    let w = params.seq(n + 2);
    let b = Rational::from(&w[1]);
    let w2 = Rational::from(&w[2]);
    let x = &b - &Rational::from(&w[n + 1]);
    let y = &Rational::from(&params.q) * &(&Rational::from(&w[n]) - &Rational::from(&w[0]));
    let t = |k: usize| &(&b * &Rational::from(&w[k + 1])) - &(&w2 * &Rational::from(&w[k]));

    // Σ t_k x^{k−2} y^{n−k} = y · Σ_{j=0}^{m} t_{j+2} x^j y^{m−j}, m = n−3,
    // accumulated highest-j first so y = 0 needs no special case
    let m = n - 3;
    let mut acc = t(m + 2);
    let mut ypow = Rational::one();
    for j in (0..m).rev() {
        ypow *= &y;
        acc = &(&acc * &x) + &(&t(j + 2) * &ypow);
    }

    let head = &(&(&b * &b) - &(&w2 * &Rational::from(&w[n]))) * &x.pow(n - 2);
    Ok(&head + &(&y * &acc))
}

/// The Hessenberg scalars for given parameters and size.
///
/// Both W₁ and W₁ − W_{n+1} appear in denominators; either vanishing is a
/// degenerate case reported by name, not a singular matrix.
pub fn scalars(params: &HoradamParams, n: usize) -> Result<HessenbergScalars> {
    check_dimension(n)?;
    let w = params.seq(n + 2);
    let w1 = Rational::from(&w[1]);
    if w1.is_zero() {
        return Err(Error::Degenerate {
            denominator: "W1".to_string(),
        });
    }
    let diag = &w1 - &Rational::from(&w[n + 1]);
    if diag.is_zero() {
        return Err(Error::Degenerate {
            denominator: format!("W1 - W{}", n + 1),
        });
    }
    let q = Rational::from(&params.q);
    let sub = &q * &(&Rational::from(&w[0]) - &Rational::from(&w[n]));
    let rho = (-&sub).checked_div(&diag)?;
    let w2 = Rational::from(&w[2]);

    // g_n = W₁ − W₂W_n/W₁ + Σ_{k=2}^{n−1} (W_{k+1} − W₂W_k/W₁) ρ^{n−k}
    let mut gn = &w1 - &(&w2 * &Rational::from(&w[n])).checked_div(&w1)?;
    let mut rho_pow = Rational::one();
    for k in (2..n).rev() {
        rho_pow *= &rho;
        let term = &Rational::from(&w[k + 1]) - &(&w2 * &Rational::from(&w[k])).checked_div(&w1)?;
        gn += &(&term * &rho_pow);
    }

    // g′_n = Σ_{k=2}^{n} W_k ρ^{n−k}
    let mut gn_prime = Rational::zero();
    let mut rho_pow = Rational::one();
    for k in (2..=n).rev() {
        gn_prime += &(&Rational::from(&w[k]) * &rho_pow);
        rho_pow *= &rho;
    }

    Ok(HessenbergScalars {
        gn,
        gn_prime,
        diag,
        sub,
    })
}

/// det = W₁ · (W₁ − W_{n+1})^{n−2} · g_n — the determinant through the
/// Hessenberg route, sharing no arithmetic with [`det_eq3`] beyond the
/// sequence itself.
pub fn det_via_gn(params: &HoradamParams, n: usize) -> Result<Rational> {
    let s = scalars(params, n)?;
    let b = Rational::from(&params.b);
    Ok(&(&b * &s.diag.pow(n - 2)) * &s.gn)
}

/// The m×m lower bidiagonal matrix with `diag` on the diagonal and `sub`
/// directly below it.
pub fn bidiagonal(diag: &Rational, sub: &Rational, m: usize) -> DenseMatrix {
    let mut a = DenseMatrix::zeros(m, m);
    for i in 0..m {
        a[(i, i)] = diag.clone();
        if i + 1 < m {
            a[(i + 1, i)] = sub.clone();
        }
    }
    a
}

fn bidiag_inverse_with_numer(diag: &Rational, numer: Rational, m: usize) -> Result<DenseMatrix> {
    if diag.is_zero() {
        return Err(Error::Degenerate {
            denominator: "diagonal".to_string(),
        });
    }
    let ratio = numer / diag;
    // value on the d-th subdiagonal: ratio^d / diag
    let mut band = Vec::with_capacity(m);
    let mut v = diag.recip()?;
    for _ in 0..m {
        band.push(v.clone());
        v *= &ratio;
    }
    let mut inv = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            inv[(i, j)] = band[i - j].clone();
        }
    }
    Ok(inv)
}

/// Exact inverse of [`bidiagonal`]`(diag, sub, m)`: entry (i, j) for i ≥ j
/// is (−sub)^{i−j} / diag^{i−j+1}. Forward substitution on the columns of
/// the identity gives exactly this alternating form.
pub fn bidiag_inverse(diag: &Rational, sub: &Rational, m: usize) -> Result<DenseMatrix> {
    bidiag_inverse_with_numer(diag, -sub, m)
}

/// The same entries without the alternating sign — sub^{i−j} / diag^{i−j+1}.
///
/// This is **not** an inverse of the bidiagonal matrix whenever sub ≠ 0 and
/// m ≥ 2; it exists so the audit can evaluate the formula in this shape and
/// record the exact residual. The product bidiagonal·result is I + N where
/// N(i, j) = 2(sub/diag)^{i−j} below the diagonal.
pub fn bidiag_inverse_printed(diag: &Rational, sub: &Rational, m: usize) -> Result<DenseMatrix> {
    bidiag_inverse_with_numer(diag, sub.clone(), m)
}
