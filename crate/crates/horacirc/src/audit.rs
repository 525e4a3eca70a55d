//! Formula auditing: evaluate each closed-form expression exactly as
//! printed, compare it against an independent oracle over a parameter grid,
//! and emit deterministic machine-readable reports.
//!
//! Mismatches are *findings*, not failures — the point of the audit is to
//! characterize exactly where the printed formulas hold and where they
//! don't. Only internal-consistency violations (the audit disagreeing with
//! itself) are treated as errors by callers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::circulant::Circulant;
use crate::closed_form::{
    self, bidiag_inverse, bidiag_inverse_printed, bidiagonal, scalars, HessenbergScalars,
};
use crate::decomposition::{
    claimed_kl_sign, expected_hessenberg, structured_inverse, transform_k, transform_l,
    TRANSCRIPTION_ASSUMPTIONS,
};
use crate::error::{Error, Result};
use crate::horadam::HoradamParams;
use crate::matrix::DenseMatrix;
use crate::oracle::{bareiss_det, dft_eigenvalues, gauss_inverse};
use crate::rational::Rational;

/// Identifiers for every audited formula. Declaration order is the
/// deterministic report order (last component of the case key).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormulaId {
    Eq3Det,
    DetViaGn,
    LemmaPrinted,
    LemmaCorrected,
    Thm2W1,
    Thm2W2,
    Thm2W3,
    Thm2W4,
    Thm2W5,
    Thm2Wn,
    DftAkPrinted,
    KlSign,
    HessenbergM,
    StructuredInv,
}

impl FormulaId {
    pub const ALL: [FormulaId; 14] = [
        FormulaId::Eq3Det,
        FormulaId::DetViaGn,
        FormulaId::LemmaPrinted,
        FormulaId::LemmaCorrected,
        FormulaId::Thm2W1,
        FormulaId::Thm2W2,
        FormulaId::Thm2W3,
        FormulaId::Thm2W4,
        FormulaId::Thm2W5,
        FormulaId::Thm2Wn,
        FormulaId::DftAkPrinted,
        FormulaId::KlSign,
        FormulaId::HessenbergM,
        FormulaId::StructuredInv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaId::Eq3Det => "EQ3_DET",
            FormulaId::DetViaGn => "DET_VIA_GN",
            FormulaId::LemmaPrinted => "LEMMA_PRINTED",
            FormulaId::LemmaCorrected => "LEMMA_CORRECTED",
            FormulaId::Thm2W1 => "THM2_W1",
            FormulaId::Thm2W2 => "THM2_W2",
            FormulaId::Thm2W3 => "THM2_W3",
            FormulaId::Thm2W4 => "THM2_W4",
            FormulaId::Thm2W5 => "THM2_W5",
            FormulaId::Thm2Wn => "THM2_WN",
            FormulaId::DftAkPrinted => "DFT_AK_PRINTED",
            FormulaId::KlSign => "KL_SIGN",
            FormulaId::HessenbergM => "HESSENBERG_M",
            FormulaId::StructuredInv => "STRUCTURED_INV",
        }
    }

    fn is_thm2(self) -> bool {
        matches!(
            self,
            FormulaId::Thm2W1
                | FormulaId::Thm2W2
                | FormulaId::Thm2W3
                | FormulaId::Thm2W4
                | FormulaId::Thm2W5
                | FormulaId::Thm2Wn
        )
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .iter()
            .copied()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown formula id: {s:?}")))
    }
}

/// Unique key of one audited case; ordering is lexicographic over the
/// fields, giving the deterministic report order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CaseKey {
    pub a: i64,
    pub b: i64,
    pub p: i64,
    pub q: i64,
    pub n: usize,
    pub formula: FormulaId,
}

impl fmt::Display for CaseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(a={}, b={}, p={}, q={}, n={}, {})",
            self.a, self.b, self.p, self.q, self.n, self.formula
        )
    }
}

/// A first differing entry between two exact matrices (or rows).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryDiff {
    pub row: usize,
    pub col: usize,
    pub printed: Rational,
    pub oracle: Rational,
}

/// Exact determinants of the two transformation matrices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignPair {
    pub det_k: Rational,
    pub det_l: Rational,
}

/// Value payloads a report can carry. Serialized untagged: scalars as
/// canonical rational strings, rows/matrices as nested arrays, floats as
/// numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AuditValue {
    Int(i64),
    Scalar(Rational),
    Row(Vec<Rational>),
    Matrix(Vec<Vec<Rational>>),
    Floats(Vec<f64>),
    Signs(SignPair),
    Entry(EntryDiff),
    Text(String),
}

fn matrix_value(m: &DenseMatrix) -> AuditValue {
    AuditValue::Matrix((0..m.rows()).map(|i| m.row(i).to_vec()).collect())
}

/// One case's outcome. `match` is false for skipped cases; `skipped`
/// carries the precondition that failed. Exactly one of
/// {skipped, printed+oracle} is populated.
#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub case: CaseKey,
    pub printed: Option<AuditValue>,
    pub oracle: Option<AuditValue>,
    #[serde(rename = "match")]
    pub matched: bool,
    pub discrepancy: Option<AuditValue>,
    pub skipped: Option<String>,
    /// The audit contradicting itself (dual evaluators disagreeing, an
    /// oracle identity failing). Not part of the serialized schema;
    /// aggregated by [`summarize`].
    #[serde(skip)]
    pub internal_violation: Option<String>,
}

impl AuditReport {
    fn skipped(case: CaseKey, reason: String) -> Self {
        AuditReport {
            case,
            printed: None,
            oracle: None,
            matched: false,
            discrepancy: None,
            skipped: Some(reason),
            internal_violation: None,
        }
    }

    fn evaluated(
        case: CaseKey,
        printed: AuditValue,
        oracle: AuditValue,
        matched: bool,
        discrepancy: Option<AuditValue>,
    ) -> Self {
        debug_assert_eq!(matched, discrepancy.is_none());
        AuditReport {
            case,
            printed: Some(printed),
            oracle: Some(oracle),
            matched,
            discrepancy,
            skipped: None,
            internal_violation: None,
        }
    }
}

/// Sign convention for the recurrence's second coefficient. `MinusQ` form
/// W(k) = pW(k−1) − qW(k−2) is mapped onto the canonical +q form by
/// negating q; case keys always carry the effective (canonical) q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    PlusQ,
    MinusQ,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridSpec {
    /// Inclusive range for a.
    pub a_min: i64,
    pub a_max: i64,
    /// Inclusive range for b; 0 is always excluded (W₁ = b and most
    /// formulas divide by it).
    pub b_min: i64,
    pub b_max: i64,
    pub p_values: Vec<i64>,
    pub q_values: Vec<i64>,
    /// Inclusive range for the dimension.
    pub n_min: usize,
    pub n_max: usize,
    pub formulas: Vec<FormulaId>,
    pub convention: Convention,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            a_min: -2,
            a_max: 2,
            b_min: -2,
            b_max: 2,
            p_values: vec![1, 2, 3],
            q_values: vec![1, 2, 3],
            n_min: 3,
            n_max: 10,
            formulas: FormulaId::ALL.to_vec(),
            convention: Convention::PlusQ,
        }
    }
}

impl GridSpec {
    pub fn case_count(&self) -> usize {
        let a = (self.a_max - self.a_min + 1).max(0) as usize;
        let b = ((self.b_max - self.b_min + 1).max(0) as usize)
            .saturating_sub(if self.b_min <= 0 && self.b_max >= 0 { 1 } else { 0 });
        a * b
            * self.p_values.len()
            * self.q_values.len()
            * (self.n_max - self.n_min + 1)
            * self.formulas.len()
    }
}

fn rat(x: &BigInt) -> Rational {
    Rational::from(x)
}

/// The direct determinant expression evaluated naively — explicit powers,
/// term by term, sharing nothing with the Horner evaluation in
/// `closed_form::det_eq3`. The two must agree exactly; that cross-check
/// guards the audit against its own transcription bugs.
pub fn eval_eq3_printed(params: &HoradamParams, n: usize) -> Result<Rational> {
    if n < 3 {
        return Err(Error::UnsupportedDimension { n, min: 3 });
    }
    let w = params.seq(n + 2);
    let b = rat(&w[1]);
    let w2 = rat(&w[2]);
    let q = Rational::from(&params.q);
    let x = &b - &rat(&w[n + 1]);
    // (qW_n − qa), written exactly as the two products it is printed as
    let y = &(&q * &rat(&w[n])) - &(&q * &rat(&w[0]));

    let mut det = &(&(&b * &b) - &(&w2 * &rat(&w[n]))) * &x.pow(n - 2);
    for k in 2..n {
        let t = &(&b * &rat(&w[k + 1])) - &(&w2 * &rat(&w[k]));
        det += &(&(&t * &x.pow(k - 2)) * &y.pow(n - k));
    }
    Ok(det)
}

/// Evaluate one of the six printed inverse entries, transcribed
/// term-for-term. `which` selects among the W1/W2/W3/W4/W5/WN variants;
/// anything else is an argument error.
///
/// Positional applicability (assumed, not stated): W4 needs n ≥ 4, W5
/// needs n ≥ 5.
pub fn eval_thm2_entry(params: &HoradamParams, n: usize, which: FormulaId) -> Result<Rational> {
    let s = scalars(params, n)?;
    if s.gn.is_zero() {
        return Err(Error::Singular);
    }
    let w = params.seq(n + 3);
    let w1 = rat(&w[1]);
    let w2 = rat(&w[2]);
    let p = Rational::from(&params.p);
    let q = Rational::from(&params.q);
    let g = &s.gn;
    let diag = &s.diag;
    let g_diag = g * diag;
    // (W₀ − W_n)/(W₁ − W_{n+1}), the ratio the series entries run through
    let ratio = (&rat(&w[0]) - &rat(&w[n])).checked_div(diag)?;
    // W_j − W₂W_{j−1}/W₁ appears in every series term
    let w_ratio = |j: usize| -> Result<Rational> {
        Ok(&rat(&w[j]) - &(&w2 * &rat(&w[j - 1])).checked_div(&w1)?)
    };

    match which {
        FormulaId::Thm2W1 => {
            // 1/g − (1/(g·diag))[p(W_n − W₂W_{n−1}/W₁)
            //   + Σ_{k=1}^{n−2} q^k (W_{n−k} − W₂W_{n−k−1}/W₁) ratio^{k−1} (1 + p·ratio)]
            let tail = &Rational::one() + &(&p * &ratio);
            let mut bracket = &p * &w_ratio(n)?;
            for k in 1..=n - 2 {
                bracket += &(&(&q.pow(k) * &w_ratio(n - k)?) * &(&ratio.pow(k - 1) * &tail));
            }
            Ok(&g.recip()? - &bracket.checked_div(&g_diag)?)
        }
        FormulaId::Thm2W2 => {
            // −W₂/(gW₁) − (1/(g·diag)) Σ_{k=1}^{n−2} (q·ratio)^{k−1} (W_{n−k+1} − W₂W_{n−k}/W₁)
            let q_ratio = &q * &ratio;
            let mut sum = Rational::zero();
            for k in 1..=n - 2 {
                sum += &(&q_ratio.pow(k - 1) * &w_ratio(n - k + 1)?);
            }
            Ok(&(-&w2.checked_div(&(g * &w1))?) - &sum.checked_div(&g_diag)?)
        }
        FormulaId::Thm2W3 => {
            // (W₁W₃ − W₂²)/(gW₁(W₁ − W_{n+1}))
            let num = &(&w1 * &rat(&w[3])) - &(&w2 * &w2);
            num.checked_div(&(&g_diag * &w1))
        }
        FormulaId::Thm2W4 => {
            if n < 4 {
                return Err(Error::InvalidArgument(
                    "entry not printed for n < 4".to_string(),
                ));
            }
            // (1/(g·diag))[W₄ − W₂W₃/W₁ + (W₃ − W₂²/W₁)((W_{n+2} − W₂)/diag)]
            let shift = (&rat(&w[n + 2]) - &w2).checked_div(diag)?;
            let bracket = &w_ratio(4)? + &(&w_ratio(3)? * &shift);
            bracket.checked_div(&g_diag)
        }
        FormulaId::Thm2W5 => {
            if n < 5 {
                return Err(Error::InvalidArgument(
                    "entry not printed for n < 5".to_string(),
                ));
            }
            // (q/(g·diag))(W₃ − W₂²/W₁)((W₀ − W_n)(W_{n+2} − W₂)/diag² − 1)
            let twist = &(&(&rat(&w[0]) - &rat(&w[n])) * &(&rat(&w[n + 2]) - &w2))
                .checked_div(&(diag * diag))?
                - &Rational::one();
            (&(&q * &w_ratio(3)?) * &twist).checked_div(&g_diag)
        }
        FormulaId::Thm2Wn => {
            // (1/(g·diag))[(W_n − W₂W_{n−1}/W₁) + (W_{n−1} − W₂W_{n−2}/W₁)((W_{n+2} − W₂)/diag)
            //   + Σ_{k=2}^{n−2} q^{k−1} (W_{n−k} − W₂W_{n−k−1}/W₁) ratio^{k−2}
            //       ((W₀ − W_n)(W_{n+2} − W₂)/diag² − 1)]
            let shift = (&rat(&w[n + 2]) - &w2).checked_div(diag)?;
            let twist = &(&(&rat(&w[0]) - &rat(&w[n])) * &(&rat(&w[n + 2]) - &w2))
                .checked_div(&(diag * diag))?
                - &Rational::one();
            let mut bracket = &w_ratio(n)? + &(&w_ratio(n - 1)? * &shift);
            for k in 2..=n - 2 {
                bracket += &(&(&q.pow(k - 1) * &w_ratio(n - k)?) * &(&ratio.pow(k - 2) * &twist));
            }
            bracket.checked_div(&g_diag)
        }
        other => Err(Error::InvalidArgument(format!(
            "{other} is not an inverse-entry formula"
        ))),
    }
}

/// The lemma's inverse matrix exactly as printed (no alternating sign).
pub fn eval_lemma_printed(diag: &Rational, sub: &Rational, m: usize) -> Result<DenseMatrix> {
    bidiag_inverse_printed(diag, sub, m)
}

/// Shared per-(params, n) computations, done once per grid point no matter
/// how many formulas are audited there.
struct CaseCtx {
    a: i64,
    b: i64,
    p: i64,
    q: i64,
    n: usize,
    params: HoradamParams,
    w: Vec<BigInt>,
    circ: Circulant,
    det: Rational,
    /// First row of the exact inverse; `None` when singular or not needed.
    inverse_row: Option<Vec<Rational>>,
    scalars: Result<HessenbergScalars>,
    /// Violation of the row-sum identity Σw_k = 1/ΣW_k by the oracle
    /// inverse itself — an internal error if it ever fires.
    sum_identity_violation: Option<String>,
}

impl CaseCtx {
    fn new(a: i64, b: i64, p: i64, q: i64, n: usize, need_inverse: bool) -> Self {
        let params = HoradamParams::new(a, b, p, q);
        let w = params.seq(n + 3);
        let circ = Circulant::from_params(&params, n).expect("grid n >= 3");
        let det = bareiss_det(&circ.materialize()).expect("square by construction");
        let mut inverse_row = None;
        let mut sum_identity_violation = None;
        if need_inverse && !det.is_zero() {
            let inv = gauss_inverse(&circ.materialize()).expect("nonzero determinant");
            let row = inv
                .as_circulant_first_row()
                .expect("inverse of a circulant is circulant");
            let row_sum: Rational = row.iter().sum();
            let w_sum = circ.row_sum();
            if !w_sum.is_zero() && &row_sum * &w_sum != Rational::one() {
                sum_identity_violation = Some(format!(
                    "oracle inverse violates sum identity at (a={a}, b={b}, p={p}, q={q}, n={n}): \
                     sum(w) = {row_sum}, sum(W) = {w_sum}"
                ));
            }
            inverse_row = Some(row);
        }
        let scalars = scalars(&params, n);
        CaseCtx {
            a,
            b,
            p,
            q,
            n,
            params,
            w,
            circ,
            det,
            inverse_row,
            scalars,
            sum_identity_violation,
        }
    }

    fn key(&self, formula: FormulaId) -> CaseKey {
        CaseKey {
            a: self.a,
            b: self.b,
            p: self.p,
            q: self.q,
            n: self.n,
            formula,
        }
    }

    fn degenerate_reason(&self) -> Option<String> {
        match &self.scalars {
            Err(Error::Degenerate { denominator }) => Some(format!("degenerate: {denominator} = 0")),
            Err(e) => Some(format!("error: {e}")),
            Ok(_) => None,
        }
    }

    /// diag and sub straight from the sequence — defined even when W₁ = 0,
    /// unlike the full scalar set.
    fn diag_sub(&self) -> (Rational, Rational) {
        let diag = &rat(&self.w[1]) - &rat(&self.w[self.n + 1]);
        let sub = &Rational::from(&self.params.q) * &(&rat(&self.w[0]) - &rat(&self.w[self.n]));
        (diag, sub)
    }
}

fn compare_scalars(case: CaseKey, printed: Rational, oracle: Rational) -> AuditReport {
    let matched = printed == oracle;
    let discrepancy = if matched {
        None
    } else {
        Some(AuditValue::Scalar(&printed - &oracle))
    };
    AuditReport::evaluated(
        case,
        AuditValue::Scalar(printed),
        AuditValue::Scalar(oracle),
        matched,
        discrepancy,
    )
}

fn compare_matrices(case: CaseKey, printed: &DenseMatrix, oracle: &DenseMatrix) -> AuditReport {
    let diff = printed.first_difference(oracle);
    let matched = diff.is_none();
    let discrepancy = diff.map(|(row, col, p, o)| {
        AuditValue::Entry(EntryDiff {
            row,
            col,
            printed: p,
            oracle: o,
        })
    });
    AuditReport::evaluated(
        case,
        matrix_value(printed),
        matrix_value(oracle),
        matched,
        discrepancy,
    )
}

fn audit_case(ctx: &CaseCtx, formula: FormulaId) -> AuditReport {
    let case = ctx.key(formula);
    match formula {
        FormulaId::Eq3Det => {
            let printed = eval_eq3_printed(&ctx.params, ctx.n).expect("n >= 3");
            let horner = closed_form::det_eq3(&ctx.params, ctx.n).expect("n >= 3");
            let mut report = compare_scalars(case, printed.clone(), ctx.det.clone());
            if printed != horner {
                report.internal_violation = Some(format!(
                    "dual evaluation disagreement at {}: naive {} vs accumulated {}",
                    report.case, printed, horner
                ));
            }
            report
        }
        FormulaId::DetViaGn => match &ctx.scalars {
            Err(_) => AuditReport::skipped(case, ctx.degenerate_reason().unwrap()),
            Ok(s) => {
                let printed =
                    &(&Rational::from(&ctx.params.b) * &s.diag.pow(ctx.n - 2)) * &s.gn;
                compare_scalars(case, printed, ctx.det.clone())
            }
        },
        FormulaId::LemmaPrinted | FormulaId::LemmaCorrected => {
            let (diag, sub) = ctx.diag_sub();
            if diag.is_zero() {
                return AuditReport::skipped(
                    case,
                    format!("degenerate: W1 - W{} = 0", ctx.n + 1),
                );
            }
            let m = ctx.n - 2;
            let printed = if formula == FormulaId::LemmaPrinted {
                bidiag_inverse_printed(&diag, &sub, m)
            } else {
                bidiag_inverse(&diag, &sub, m)
            }
            .expect("diag checked nonzero");
            let oracle = gauss_inverse(&bidiagonal(&diag, &sub, m))
                .expect("triangular with nonzero diagonal");
            compare_matrices(case, &printed, &oracle)
        }
        f if f.is_thm2() => {
            if f == FormulaId::Thm2W4 && ctx.n < 4 {
                return AuditReport::skipped(case, "entry not printed for n < 4".to_string());
            }
            if f == FormulaId::Thm2W5 && ctx.n < 5 {
                return AuditReport::skipped(case, "entry not printed for n < 5".to_string());
            }
            match &ctx.scalars {
                Err(_) => AuditReport::skipped(case, ctx.degenerate_reason().unwrap()),
                Ok(s) if s.gn.is_zero() => {
                    AuditReport::skipped(case, "singular: g_n = 0".to_string())
                }
                Ok(_) => {
                    let printed =
                        eval_thm2_entry(&ctx.params, ctx.n, f).expect("preconditions checked");
                    let row = ctx
                        .inverse_row
                        .as_ref()
                        .expect("nonsingular: g_n != 0 with nonzero W1 and diag");
                    let idx = match f {
                        FormulaId::Thm2W1 => 0,
                        FormulaId::Thm2W2 => 1,
                        FormulaId::Thm2W3 => 2,
                        FormulaId::Thm2W4 => 3,
                        FormulaId::Thm2W5 => 4,
                        _ => ctx.n - 1,
                    };
                    let mut report = compare_scalars(case, printed, row[idx].clone());
                    report.internal_violation = ctx.sum_identity_violation.clone();
                    report
                }
            }
        }
        FormulaId::DftAkPrinted => {
            if ctx.det.is_zero() {
                return AuditReport::skipped(case, "singular: determinant = 0".to_string());
            }
            // a_k = (1/n) Σ_j λ_j ω^{−jk}, exactly as printed — no reciprocal
            // on λ_j. This is the inverse DFT of the eigenvalues, i.e. it
            // returns the original first row, not the inverse's.
            let n = ctx.n;
            let lambdas = dft_eigenvalues(&ctx.circ);
            let step = 2.0 * std::f64::consts::PI / n as f64;
            let printed: Vec<f64> = (0..n)
                .map(|k| {
                    let mut ak = Complex64::new(0.0, 0.0);
                    for (j, lj) in lambdas.iter().enumerate() {
                        ak += lj * Complex64::from_polar(1.0, -step * ((j * k) % n) as f64);
                    }
                    (ak / n as f64).re
                })
                .collect();
            let oracle: Vec<f64> = ctx
                .inverse_row
                .as_ref()
                .expect("inverse computed: determinant nonzero")
                .iter()
                .map(Rational::to_f64)
                .collect();
            let bad = (0..n).find(|&k| {
                let err = (printed[k] - oracle[k]).abs();
                err > 1e-9 * oracle[k].abs().max(1.0)
            });
            let matched = bad.is_none();
            let discrepancy = bad.map(|k| {
                AuditValue::Text(format!(
                    "index {k}: printed {} vs oracle {}",
                    printed[k], oracle[k]
                ))
            });
            AuditReport::evaluated(
                case,
                AuditValue::Floats(printed),
                AuditValue::Floats(oracle),
                matched,
                discrepancy,
            )
        }
        FormulaId::KlSign => {
            if ctx.w[1].is_zero() {
                return AuditReport::skipped(case, "degenerate: W1 = 0".to_string());
            }
            let (diag, _) = ctx.diag_sub();
            if diag.is_zero() {
                return AuditReport::skipped(
                    case,
                    format!("degenerate: W1 - W{} = 0", ctx.n + 1),
                );
            }
            let det_k = bareiss_det(&transform_k(&ctx.params, ctx.n).expect("W1 nonzero"))
                .expect("square");
            let det_l = bareiss_det(&transform_l(&ctx.params, ctx.n).expect("diag nonzero"))
                .expect("square");
            let claimed = Rational::from(claimed_kl_sign(ctx.n) as i64);
            let matched =
                det_k == claimed && det_l == claimed && &det_k * &det_l == Rational::one();
            let discrepancy = if matched {
                None
            } else {
                Some(AuditValue::Text(format!(
                    "claimed {claimed} for both; computed det(K) = {det_k}, det(L) = {det_l}"
                )))
            };
            AuditReport::evaluated(
                case,
                AuditValue::Int(claimed_kl_sign(ctx.n) as i64),
                AuditValue::Signs(SignPair { det_k, det_l }),
                matched,
                discrepancy,
            )
        }
        FormulaId::HessenbergM => match &ctx.scalars {
            Err(_) => AuditReport::skipped(case, ctx.degenerate_reason().unwrap()),
            Ok(_) => {
                let expected =
                    expected_hessenberg(&ctx.params, ctx.n).expect("scalars available");
                let k = transform_k(&ctx.params, ctx.n).expect("W1 nonzero");
                let l = transform_l(&ctx.params, ctx.n).expect("diag nonzero");
                let w_mat = ctx.circ.materialize();
                let actual = k.mul(&w_mat).expect("n x n").mul(&l).expect("n x n");
                let mut report = compare_matrices(case, &expected, &actual);
                // independent multiplicativity cross-check of the audit's
                // own product
                let dm = bareiss_det(&actual).expect("square");
                let dk = bareiss_det(&k).expect("square");
                let dl = bareiss_det(&l).expect("square");
                if dm != &(&dk * &ctx.det) * &dl {
                    report.internal_violation = Some(format!(
                        "determinant multiplicativity failed at {}: det(KWL) = {}, det(K)det(W)det(L) = {}",
                        report.case,
                        dm,
                        &(&dk * &ctx.det) * &dl
                    ));
                }
                report
            }
        },
        FormulaId::StructuredInv => match &ctx.scalars {
            Err(_) => AuditReport::skipped(case, ctx.degenerate_reason().unwrap()),
            Ok(s) if s.gn.is_zero() => {
                AuditReport::skipped(case, "singular: g_n = 0".to_string())
            }
            Ok(_) => {
                let si = structured_inverse(&ctx.params, ctx.n)
                    .expect("preconditions checked");
                let oracle_row = ctx
                    .inverse_row
                    .as_ref()
                    .expect("nonsingular: g_n != 0")
                    .clone();
                let candidate_row = si.candidate.row(0).to_vec();
                let matched = si.valid && candidate_row == oracle_row;
                let discrepancy = if matched {
                    None
                } else if let Some(f) = &si.failure {
                    Some(AuditValue::Text(format!(
                        "{} check failed at ({}, {}): got {}, expected {}",
                        f.check, f.row, f.col, f.got, f.expected
                    )))
                } else {
                    let k = candidate_row
                        .iter()
                        .zip(oracle_row.iter())
                        .position(|(x, y)| x != y)
                        .unwrap_or(0);
                    Some(AuditValue::Entry(EntryDiff {
                        row: 0,
                        col: k,
                        printed: candidate_row[k].clone(),
                        oracle: oracle_row[k].clone(),
                    }))
                };
                AuditReport::evaluated(
                    case,
                    AuditValue::Row(candidate_row),
                    AuditValue::Row(oracle_row),
                    matched,
                    discrepancy,
                )
            }
        },
        _ => unreachable!("all formula ids handled"),
    }
}

const NEEDS_INVERSE: [FormulaId; 8] = [
    FormulaId::Thm2W1,
    FormulaId::Thm2W2,
    FormulaId::Thm2W3,
    FormulaId::Thm2W4,
    FormulaId::Thm2W5,
    FormulaId::Thm2Wn,
    FormulaId::DftAkPrinted,
    FormulaId::StructuredInv,
];

/// Run every requested formula over the whole grid. Output is sorted by
/// case key and is byte-identical across runs with the same spec.
pub fn run_grid(spec: &GridSpec) -> Vec<AuditReport> {
    let need_inverse = spec.formulas.iter().any(|f| NEEDS_INVERSE.contains(f));
    let mut reports = Vec::with_capacity(spec.case_count());
    for a in spec.a_min..=spec.a_max {
        for b in spec.b_min..=spec.b_max {
            if b == 0 {
                continue;
            }
            for &p in &spec.p_values {
                for &q_raw in &spec.q_values {
                    let q = match spec.convention {
                        Convention::PlusQ => q_raw,
                        Convention::MinusQ => -q_raw,
                    };
                    for n in spec.n_min..=spec.n_max {
                        let ctx = CaseCtx::new(a, b, p, q, n, need_inverse);
                        for &formula in &spec.formulas {
                            reports.push(audit_case(&ctx, formula));
                        }
                    }
                }
            }
        }
    }
    reports.sort_by(|x, y| x.case.cmp(&y.case));
    reports
}

#[derive(Clone, Debug, Serialize)]
pub struct FormulaTotals {
    pub formula: FormulaId,
    pub matched: usize,
    pub mismatched: usize,
    pub skipped: usize,
    pub first_counterexample: Option<CaseKey>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErratumEntry {
    pub id: String,
    pub formula: FormulaId,
    pub description: String,
    pub mismatch_count: usize,
    pub first_counterexample: Option<CaseKey>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditSummary {
    pub totals: Vec<FormulaTotals>,
    pub errata: Vec<ErratumEntry>,
    pub internal_violations: Vec<String>,
    pub transcription_assumptions: Vec<String>,
}

impl AuditSummary {
    /// True when the audit never contradicted itself. Printed-formula
    /// mismatches do not affect this.
    pub fn is_consistent(&self) -> bool {
        self.internal_violations.is_empty()
    }
}

/// Aggregate per-formula totals, derive the erratum catalog, and collect
/// internal violations.
pub fn summarize(reports: &[AuditReport]) -> AuditSummary {
    let mut totals: Vec<FormulaTotals> = Vec::new();
    for report in reports {
        let formula = report.case.formula;
        let entry = match totals.iter_mut().find(|t| t.formula == formula) {
            Some(e) => e,
            None => {
                totals.push(FormulaTotals {
                    formula,
                    matched: 0,
                    mismatched: 0,
                    skipped: 0,
                    first_counterexample: None,
                });
                totals.last_mut().unwrap()
            }
        };
        if report.skipped.is_some() {
            entry.skipped += 1;
        } else if report.matched {
            entry.matched += 1;
        } else {
            entry.mismatched += 1;
            if entry.first_counterexample.is_none() {
                entry.first_counterexample = Some(report.case.clone());
            }
        }
    }
    totals.sort_by_key(|t| t.formula);

    let mut errata = Vec::new();
    let catalog: [(FormulaId, &str, &str); 2] = [
        (
            FormulaId::DftAkPrinted,
            "E1",
            "the printed inverse-coefficient series lacks the reciprocal on the eigenvalues; \
             as printed it reconstructs the original first row instead of the inverse's",
        ),
        (
            FormulaId::LemmaPrinted,
            "E2",
            "the printed bidiagonal-inverse entries lack the alternating sign; the corrected \
             entry is (-sub)^(i-j)/diag^(i-j+1), and the printed product A*A' deviates by \
             2*(sub/diag)^(i-j) below the diagonal",
        ),
    ];
    for (formula, id, description) in catalog {
        if let Some(t) = totals.iter().find(|t| t.formula == formula) {
            if t.mismatched > 0 {
                errata.push(ErratumEntry {
                    id: id.to_string(),
                    formula,
                    description: description.to_string(),
                    mismatch_count: t.mismatched,
                    first_counterexample: t.first_counterexample.clone(),
                });
            }
        }
    }
    let mut next = 3;
    for t in &totals {
        if t.formula.is_thm2() && t.mismatched > 0 {
            errata.push(ErratumEntry {
                id: format!("E{next}"),
                formula: t.formula,
                description: format!(
                    "printed inverse entry {} disagrees with the exact inverse on grid cases",
                    t.formula
                ),
                mismatch_count: t.mismatched,
                first_counterexample: t.first_counterexample.clone(),
            });
            next += 1;
        }
    }

    let mut internal_violations: Vec<String> = reports
        .iter()
        .filter_map(|r| r.internal_violation.clone())
        .collect();
    internal_violations.sort();
    internal_violations.dedup();

    let mut transcription_assumptions: Vec<String> = TRANSCRIPTION_ASSUMPTIONS
        .iter()
        .map(|s| s.to_string())
        .collect();
    transcription_assumptions.push(
        "THM2_W4 is evaluated only for n >= 4 and THM2_W5 only for n >= 5 (applicability \
         assumed from list position, not stated)"
            .to_string(),
    );
    transcription_assumptions.push(
        "inverse entries between w5 and wn are not printed and therefore not audited"
            .to_string(),
    );

    AuditSummary {
        totals,
        errata,
        internal_violations,
        transcription_assumptions,
    }
}

impl fmt::Display for AuditSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<16} {:>8} {:>10} {:>8}  first counterexample",
            "formula", "matched", "mismatched", "skipped"
        )?;
        for t in &self.totals {
            let ce = t
                .first_counterexample
                .as_ref()
                .map(|c| c.to_string())
                .unwrap_or_else(|| "-".to_string());
            writeln!(
                f,
                "{:<16} {:>8} {:>10} {:>8}  {}",
                t.formula.name(),
                t.matched,
                t.mismatched,
                t.skipped,
                ce
            )?;
        }
        if self.errata.is_empty() {
            writeln!(f, "errata: none")?;
        } else {
            writeln!(f, "errata:")?;
            for e in &self.errata {
                writeln!(
                    f,
                    "  {} [{}] {} ({} mismatches)",
                    e.id,
                    e.formula.name(),
                    e.description,
                    e.mismatch_count
                )?;
            }
        }
        if self.internal_violations.is_empty() {
            write!(f, "internal consistency: ok")
        } else {
            writeln!(f, "internal consistency: VIOLATED")?;
            for v in &self.internal_violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}
