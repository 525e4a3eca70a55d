//! The similarity/elimination pipeline behind the closed forms: the
//! transformation matrices K, L, U, the near-Hessenberg product M = K·𝕎·L,
//! the target block form H ⊕ A, and the structured inverse
//! 𝕎⁻¹ = (L·U)(H⁻¹ ⊕ A⁻¹)K.
//!
//! K, L and U are transcribed from their printed displays. The displays
//! show only boundary rows and corner entries with elided interiors; the
//! transcription extends each interior the single way consistent with the
//! visible entries (K's interior rows apply the coefficients 1, −p, −q to
//! consecutive cyclic columns; L's second column descends through powers of
//! ρ = q(W_n − W₀)/(W₁ − W_{n+1}); U is the identity below its second row).
//! Those extension choices are surfaced as data in the audit summary so a
//! formula failure can be distinguished from a transcription failure.

use serde::Serialize;

use crate::circulant::Circulant;
use crate::closed_form::{bidiag_inverse, bidiagonal, scalars, HessenbergScalars};
use crate::error::{Error, Result};
use crate::horadam::HoradamParams;
use crate::matrix::DenseMatrix;
use crate::oracle::bareiss_det;
use crate::rational::Rational;

/// The transcription-extension assumptions, one line per matrix, quoted in
/// audit output.
pub const TRANSCRIPTION_ASSUMPTIONS: [&str; 3] = [
    "K: each interior row i (2 <= i < n) applies coefficients (1, -p, -q) to columns (n-i, n-i+1, n-i+2) mod n, extending the visible corner rows",
    "L: column 1 holds rho^(n-1-i) in row i for 1 <= i < n with rho = q(Wn - W0)/(W1 - W(n+1)); the anti-diagonal ones run over rows 1..=n-2",
    "U: identity outside rows 0 and 1; row 0 and row 1 entries in columns >= 2 are the printed u-expressions indexed by W(n-j+2), W(n-j+1)",
];

fn check_dimension(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::UnsupportedDimension { n, min: 3 });
    }
    Ok(())
}

/// K: row 0 picks out the first row of 𝕎; row 1 subtracts W₂/W₁ of it from
/// the last; each row below applies the recurrence (1, −p, −q) across three
/// consecutive cyclic rows so that most of 𝕎 telescopes away.
///
/// Needs W₁ ≠ 0 (the −W₂/W₁ entry), nothing else.
pub fn transform_k(params: &HoradamParams, n: usize) -> Result<DenseMatrix> {
    check_dimension(n)?;
    let w = params.seq(3);
    let w1 = Rational::from(&w[1]);
    if w1.is_zero() {
        return Err(Error::Degenerate {
            denominator: "W1".to_string(),
        });
    }
    let mut k = DenseMatrix::zeros(n, n);
    k[(0, 0)] = Rational::one();
    k[(1, 0)] = -&Rational::from(&w[2]).checked_div(&w1)?;
    k[(1, n - 1)] = Rational::one();
    let p = Rational::from(&params.p);
    let q = Rational::from(&params.q);
    for i in 2..n {
        k[(i, n - i)] = Rational::one();
        k[(i, (n - i + 1) % n)] = -&p;
        k[(i, (n - i + 2) % n)] = -&q;
    }
    Ok(k)
}

/// L: identity-like column 0, a geometric column of ρ-powers in column 1,
/// and an anti-diagonal of ones that reverses the trailing block.
///
/// Needs W₁ − W_{n+1} ≠ 0 (ρ's denominator), nothing else.
pub fn transform_l(params: &HoradamParams, n: usize) -> Result<DenseMatrix> {
    check_dimension(n)?;
    let w = params.seq(n + 2);
    let diag = &Rational::from(&w[1]) - &Rational::from(&w[n + 1]);
    if diag.is_zero() {
        return Err(Error::Degenerate {
            denominator: format!("W1 - W{}", n + 1),
        });
    }
    let rho = (&Rational::from(&params.q)
        * &(&Rational::from(&w[n]) - &Rational::from(&w[0])))
        .checked_div(&diag)?;
    let mut l = DenseMatrix::zeros(n, n);
    l[(0, 0)] = Rational::one();
    // row n−1 carries ρ⁰, each row above one power more
    let mut rho_pow = Rational::one();
    for i in (1..n).rev() {
        l[(i, 1)] = rho_pow.clone();
        rho_pow *= &rho;
    }
    for i in 1..=n - 2 {
        l[(i, n - i)] = Rational::one();
    }
    Ok(l)
}

/// U as printed: identity except for the first two rows, whose entries are
/// built from g_n, g′_n and the W-ratios. This is the literal transcription;
/// whether it actually completes M into H ⊕ A is checked, not assumed.
pub fn transform_u_printed(params: &HoradamParams, n: usize) -> Result<DenseMatrix> {
    let s = scalars(params, n)?;
    if s.gn.is_zero() {
        return Err(Error::Degenerate {
            denominator: "g_n".to_string(),
        });
    }
    let w = params.seq(n + 2);
    let w1 = Rational::from(&w[1]);
    let w2 = Rational::from(&w[2]);
    let mut u = DenseMatrix::identity(n);
    u[(0, 1)] = -&s.gn_prime.checked_div(&w1)?;
    for j in 2..n {
        let w_hi = Rational::from(&w[n - j + 2]);
        let w_lo = Rational::from(&w[n - j + 1]);
        // row 1: (W_{n−j+2} − W₂W_{n−j+1}/W₁) / g_n
        let ratio_term = &w_hi - &(&w2 * &w_lo).checked_div(&w1)?;
        u[(1, j)] = ratio_term.checked_div(&s.gn)?;
        // row 0: (g′/(g·W₁))(W₂W_{n−j+1}/W₁ − W_{n−j+2}) − W_{n−j+1}/W₁
        let lead = s
            .gn_prime
            .checked_div(&(&s.gn * &w1))?;
        u[(0, j)] = &(&lead * &(-&ratio_term)) - &w_lo.checked_div(&w1)?;
    }
    Ok(u)
}

/// The form M = K·𝕎·L is supposed to take: first two rows carry the W-tail
/// and the g-scalars, then a constant diagonal/subdiagonal, zeros elsewhere.
pub fn expected_hessenberg(params: &HoradamParams, n: usize) -> Result<DenseMatrix> {
    let s = scalars(params, n)?;
    let w = params.seq(n + 2);
    let w1 = Rational::from(&w[1]);
    let w2 = Rational::from(&w[2]);
    let mut m = DenseMatrix::zeros(n, n);
    m[(0, 0)] = w1.clone();
    m[(0, 1)] = s.gn_prime.clone();
    m[(1, 1)] = s.gn.clone();
    for j in 2..n {
        m[(0, j)] = Rational::from(&w[n - j + 1]);
        m[(1, j)] = &Rational::from(&w[n - j + 2])
            - &(&w2 * &Rational::from(&w[n - j + 1])).checked_div(&w1)?;
    }
    for i in 2..n {
        m[(i, i)] = s.diag.clone();
        if i >= 3 {
            m[(i, i - 1)] = s.sub.clone();
        }
    }
    Ok(m)
}

/// Sign the determinant of K (equally, of L) is claimed to have: +1 when
/// n ≡ 1, 2 (mod 4), −1 when n ≡ 0, 3 (mod 4). The claim also implies
/// det(K)·det(L) = 1 for every n.
pub fn claimed_kl_sign(n: usize) -> i8 {
    match n % 4 {
        1 | 2 => 1,
        _ => -1,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BundleChecks {
    /// det(M) = det(K)·det(𝕎)·det(L), all four computed independently.
    pub det_multiplicative: bool,
    /// M = K·𝕎·L matches [`expected_hessenberg`] entry for entry.
    pub hessenberg_match: bool,
    /// K·𝕎·L·U = H ⊕ A with U as printed.
    pub direct_sum_match: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionBundle {
    pub k: DenseMatrix,
    pub l: DenseMatrix,
    pub u: DenseMatrix,
    /// diag(W₁, g_n).
    pub h: DenseMatrix,
    /// The (n−2)×(n−2) bidiagonal tail block.
    pub a: DenseMatrix,
    /// K·𝕎·L, computed exactly.
    pub m: DenseMatrix,
    pub checks: BundleChecks,
}

/// Construct every matrix in the pipeline and run the identity checks.
///
/// Needs W₁ ≠ 0, W₁ − W_{n+1} ≠ 0 and g_n ≠ 0 (U divides by all three);
/// each vanishing denominator is named.
pub fn build(params: &HoradamParams, n: usize) -> Result<DecompositionBundle> {
    let s = scalars(params, n)?;
    if s.gn.is_zero() {
        return Err(Error::Degenerate {
            denominator: "g_n".to_string(),
        });
    }
    let k = transform_k(params, n)?;
    let l = transform_l(params, n)?;
    let u = transform_u_printed(params, n)?;
    let w_mat = Circulant::from_params(params, n)?.materialize();

    let m = k.mul(&w_mat)?.mul(&l)?;
    let w1 = Rational::from(&params.b);
    let h = DenseMatrix::diagonal(&[w1, s.gn.clone()]);
    let a = bidiagonal(&s.diag, &s.sub, n - 2);

    let det_multiplicative = {
        let dm = bareiss_det(&m)?;
        let dk = bareiss_det(&k)?;
        let dw = bareiss_det(&w_mat)?;
        let dl = bareiss_det(&l)?;
        dm == &(&dk * &dw) * &dl
    };
    let hessenberg_match = m == expected_hessenberg(params, n)?;
    let direct_sum_match = m.mul(&u)? == h.direct_sum(&a);

    Ok(DecompositionBundle {
        k,
        l,
        u,
        h,
        a,
        m,
        checks: BundleChecks {
            det_multiplicative,
            hessenberg_match,
            direct_sum_match,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionMismatch {
    pub row: usize,
    pub col: usize,
    pub got: Rational,
    pub expected: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionCheck {
    pub region: &'static str,
    pub pass: bool,
    pub first_mismatch: Option<RegionMismatch>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HessenbergReport {
    pub all_pass: bool,
    pub regions: Vec<RegionCheck>,
}

/// Compare M = K·𝕎·L against the expected form region by region: the two
/// special rows, the constant diagonal and subdiagonal, and the zero fill.
/// Mismatches are findings, not errors.
pub fn verify_hessenberg(
    bundle: &DecompositionBundle,
    params: &HoradamParams,
    n: usize,
) -> Result<HessenbergReport> {
    let expected = expected_hessenberg(params, n)?;
    let m = &bundle.m;

    let classify = |i: usize, j: usize| -> &'static str {
        match i {
            0 => "row0",
            1 => "row1",
            _ if j == i => "diagonal",
            _ if i >= 3 && j == i - 1 => "subdiagonal",
            _ => "zeros",
        }
    };

    let mut regions: Vec<RegionCheck> = ["row0", "row1", "diagonal", "subdiagonal", "zeros"]
        .iter()
        .map(|&region| RegionCheck {
            region,
            pass: true,
            first_mismatch: None,
        })
        .collect();

    for i in 0..n {
        for j in 0..n {
            if m[(i, j)] == expected[(i, j)] {
                continue;
            }
            let region = classify(i, j);
            let entry = regions.iter_mut().find(|r| r.region == region).unwrap();
            entry.pass = false;
            if entry.first_mismatch.is_none() {
                entry.first_mismatch = Some(RegionMismatch {
                    row: i,
                    col: j,
                    got: m[(i, j)].clone(),
                    expected: expected[(i, j)].clone(),
                });
            }
        }
    }

    Ok(HessenbergReport {
        all_pass: regions.iter().all(|r| r.pass),
        regions,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseFailure {
    /// Which validation failed: `"product"` (P·𝕎 ≠ I) or `"circulant"`
    /// (P is not a cyclic-shift matrix).
    pub check: &'static str,
    pub row: usize,
    pub col: usize,
    pub got: Rational,
    pub expected: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructuredInverse {
    pub valid: bool,
    /// First row of the inverse; present exactly when `valid`.
    pub first_row: Option<Vec<Rational>>,
    pub failure: Option<InverseFailure>,
    /// The full candidate P = (L·U)(H⁻¹ ⊕ A⁻¹)K, kept for diagnostics.
    #[serde(skip)]
    pub candidate: DenseMatrix,
}

/// Assemble 𝕎⁻¹ = (L·U)(H⁻¹ ⊕ A⁻¹)K from the printed pieces and validate
/// the result against 𝕎 itself.
///
/// The product and circulant-shape checks are exact; a failure is returned
/// as data with the first offending entry, never papered over by falling
/// back to elimination.
pub fn structured_inverse(params: &HoradamParams, n: usize) -> Result<StructuredInverse> {
    let s: HessenbergScalars = scalars(params, n)?;
    if s.gn.is_zero() {
        // det = W₁·diag^{n−2}·g_n, and the other two factors are nonzero here
        return Err(Error::Singular);
    }
    let bundle = build(params, n)?;
    let w_mat = Circulant::from_params(params, n)?.materialize();

    let h_inv = DenseMatrix::diagonal(&[
        Rational::from(&params.b).recip()?,
        s.gn.recip()?,
    ]);
    let a_inv = bidiag_inverse(&s.diag, &s.sub, n - 2)?;
    let t = bundle.l.mul(&bundle.u)?;
    let p = t.mul(&h_inv.direct_sum(&a_inv))?.mul(&bundle.k)?;

    // exact validation: P·𝕎 = I
    let product = p.mul(&w_mat)?;
    if let Some((i, j, got, expected)) =
        product.first_difference(&DenseMatrix::identity(n))
    {
        return Ok(StructuredInverse {
            valid: false,
            first_row: None,
            failure: Some(InverseFailure {
                check: "product",
                row: i,
                col: j,
                got,
                expected,
            }),
            candidate: p,
        });
    }
    // structural validation: every row of P is the right-shift of the one above
    for i in 1..n {
        for j in 0..n {
            let above = p[(i - 1, (j + n - 1) % n)].clone();
            if p[(i, j)] != above {
                return Ok(StructuredInverse {
                    valid: false,
                    first_row: None,
                    failure: Some(InverseFailure {
                        check: "circulant",
                        row: i,
                        col: j,
                        got: p[(i, j)].clone(),
                        expected: above,
                    }),
                    candidate: p,
                });
            }
        }
    }

    Ok(StructuredInverse {
        valid: true,
        first_row: Some(p.row(0).to_vec()),
        failure: None,
        candidate: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horadam::Preset;
    use crate::oracle::gauss_inverse;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn fib() -> HoradamParams {
        Preset::Fibonacci.params()
    }

    #[test]
    fn k_rows_for_reference_case() {
        let k = transform_k(&fib(), 4).unwrap();
        let row0: Vec<i64> = vec![1, 0, 0, 0];
        let row1: Vec<i64> = vec![-1, 0, 0, 1];
        for j in 0..4 {
            assert_eq!(k[(0, j)], Rational::from(row0[j]));
            assert_eq!(k[(1, j)], Rational::from(row1[j]));
        }
        // interior rows: 1 at n−i, then −p, −q cyclically
        assert_eq!(k[(2, 2)], Rational::one());
        assert_eq!(k[(2, 3)], Rational::from(-1));
        assert_eq!(k[(2, 0)], Rational::from(-1));
        assert_eq!(k[(3, 1)], Rational::one());
        assert_eq!(k[(3, 2)], Rational::from(-1));
        assert_eq!(k[(3, 3)], Rational::from(-1));
    }

    #[test]
    fn l_columns_for_reference_case() {
        let l = transform_l(&fib(), 4).unwrap();
        // ρ = q(W₄−W₀)/(W₁−W₅) = 3/(1−5) = −3/4
        assert_eq!(l[(0, 0)], Rational::one());
        assert_eq!(l[(1, 1)], rat(9, 16));
        assert_eq!(l[(2, 1)], rat(-3, 4));
        assert_eq!(l[(3, 1)], Rational::one());
        assert_eq!(l[(1, 3)], Rational::one());
        assert_eq!(l[(2, 2)], Rational::one());
        // no anti-diagonal one in the last row
        assert_eq!(l[(3, 3)], Rational::zero());
    }

    #[test]
    fn m_matches_hand_computation() {
        let bundle = build(&fib(), 4).unwrap();
        let expect = DenseMatrix::from_rows(vec![
            vec![rat(1, 1), rat(33, 16), rat(2, 1), rat(1, 1)],
            vec![rat(0, 1), rat(-35, 16), rat(1, 1), rat(1, 1)],
            vec![rat(0, 1), rat(0, 1), rat(-4, 1), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(-3, 1), rat(-4, 1)],
        ])
        .unwrap();
        assert_eq!(bundle.m, expect);
        assert_eq!(bundle.h, DenseMatrix::diagonal(&[rat(1, 1), rat(-35, 16)]));
        assert!(bundle.checks.det_multiplicative);
        assert!(bundle.checks.hessenberg_match);
    }

    #[test]
    fn hessenberg_shape_verified_across_presets() {
        for preset in Preset::ALL {
            let params = preset.params();
            for n in 3..=8 {
                let bundle = match build(&params, n) {
                    Ok(b) => b,
                    Err(Error::Degenerate { .. }) => continue,
                    Err(e) => panic!("{preset} n={n}: {e}"),
                };
                let report = verify_hessenberg(&bundle, &params, n).unwrap();
                assert!(report.all_pass, "{preset} n={n}: {:?}", report.regions);
                assert!(bundle.checks.det_multiplicative, "{preset} n={n}");
            }
        }
    }

    #[test]
    fn kl_sign_claim_matches_exact_determinants() {
        for n in 3..=12 {
            let claimed = Rational::from(claimed_kl_sign(n) as i64);
            let dk = bareiss_det(&transform_k(&fib(), n).unwrap()).unwrap();
            let dl = bareiss_det(&transform_l(&fib(), n).unwrap()).unwrap();
            assert_eq!(dk, claimed, "det(K) at n={n}");
            assert_eq!(dl, claimed, "det(L) at n={n}");
            assert_eq!(&dk * &dl, Rational::one(), "product at n={n}");
        }
    }

    #[test]
    fn printed_u_misses_the_block_form_in_row_1() {
        // with U as printed, K𝕎LU agrees with H ⊕ A everywhere except row 1,
        // columns ≥ 2, where it carries exactly twice the M entry
        let bundle = build(&fib(), 4).unwrap();
        assert!(!bundle.checks.direct_sum_match);
        let klu = bundle.m.mul(&bundle.u).unwrap();
        let target = bundle.h.direct_sum(&bundle.a);
        for i in 0..4 {
            for j in 0..4 {
                if i == 1 && j >= 2 {
                    let twice = &Rational::from(2) * &bundle.m[(i, j)];
                    assert_eq!(klu[(i, j)], twice, "(1,{j})");
                } else {
                    assert_eq!(klu[(i, j)], target[(i, j)], "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn structured_inverse_reports_the_printed_u_failure() {
        for n in [3usize, 4, 5, 6] {
            let result = structured_inverse(&fib(), n).unwrap();
            assert!(!result.valid, "n={n}");
            let failure = result.failure.expect("diagnostics present");
            assert_eq!(failure.check, "product");
        }
    }

    #[test]
    fn corrected_u_completes_the_pipeline() {
        // negating the printed row-1 entries of U (and re-deriving the row-0
        // entries that depend on them) makes the whole pipeline exact; this
        // pins the defect to U's row-1 sign and clears K, L, H and A
        for preset in Preset::ALL {
            let params = preset.params();
            for n in 3..=7 {
                let bundle = match build(&params, n) {
                    Ok(b) => b,
                    Err(_) => continue,
                };
                let s = scalars(&params, n).unwrap();
                let w = params.seq(n + 2);
                let w1 = Rational::from(&w[1]);

                let mut u = DenseMatrix::identity(n);
                u[(0, 1)] = -&s.gn_prime.checked_div(&w1).unwrap();
                for j in 2..n {
                    u[(1, j)] = -&bundle.m[(1, j)].checked_div(&s.gn).unwrap();
                    let num = &(&s.gn_prime * &u[(1, j)]) + &Rational::from(&w[n - j + 1]);
                    u[(0, j)] = -&num.checked_div(&w1).unwrap();
                }

                let klu = bundle.m.mul(&u).unwrap();
                assert_eq!(klu, bundle.h.direct_sum(&bundle.a), "{preset} n={n}");

                let h_inv = gauss_inverse(&bundle.h).unwrap();
                let a_inv = bidiag_inverse(&s.diag, &s.sub, n - 2).unwrap();
                let p = bundle
                    .l
                    .mul(&u)
                    .unwrap()
                    .mul(&h_inv.direct_sum(&a_inv))
                    .unwrap()
                    .mul(&bundle.k)
                    .unwrap();
                let w_mat = Circulant::from_params(&params, n).unwrap().materialize();
                assert_eq!(p, gauss_inverse(&w_mat).unwrap(), "{preset} n={n}");
                assert!(p.as_circulant_first_row().is_some(), "{preset} n={n}");
            }
        }
    }

    #[test]
    fn singular_and_degenerate_cases_are_distinguished() {
        // g₃ = 0 with both denominators fine: genuinely singular
        let params = HoradamParams::new(2, -1, 1, 1);
        assert!(matches!(
            structured_inverse(&params, 3),
            Err(Error::Singular)
        ));
        // W₁ = 0: degenerate, not singular
        let params = HoradamParams::new(1, 0, 1, 1);
        match structured_inverse(&params, 3) {
            Err(Error::Degenerate { denominator }) => assert_eq!(denominator, "W1"),
            other => panic!("expected degenerate W1, got {other:?}"),
        }
    }

    #[test]
    fn block_form_is_exactly_block_diagonal() {
        let bundle = build(&fib(), 5).unwrap();
        let ha = bundle.h.direct_sum(&bundle.a);
        for i in 0..5 {
            for j in 0..5 {
                let cross = (i < 2) != (j < 2);
                if cross {
                    assert!(ha[(i, j)].is_zero(), "({i},{j})");
                }
            }
        }
    }
}
