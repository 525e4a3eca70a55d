//! Wall-clock comparison of determinant and inverse strategies on growing
//! circulants. Every cell validates its value against an exact reference
//! before any timing counts, so a fast-but-wrong method can never win a
//! row; divergence is flagged, not hidden.
//!
//! Cells run strictly sequentially. A per-cell wall budget (default 60 s,
//! `HORACIRC_TIMEOUT_SECS` overrides) is checked between repetitions;
//! blowing it marks the cell `timed_out` with however many samples were
//! collected — it never aborts the run.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::circulant::Circulant;
use crate::closed_form::det_eq3;
use crate::decomposition::structured_inverse;
use crate::error::{Error, Result};
use crate::horadam::HoradamParams;
use crate::oracle::{bareiss_det, dft_eigenvalues, dft_inverse, gauss_inverse};
use crate::rational::Rational;

pub const DEFAULT_TIMEOUT_SECS: u64 = 60;

/// Relative tolerance for floating-point methods; exact methods compare
/// exactly. Entries grow exponentially in n, so floating det values are
/// compared in the log domain.
pub const FLOAT_REL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DetMethod {
    Closed,
    Bareiss,
    Dft,
    Fft,
}

/// The fft path is opt-in: it measures the same floating strategy as
/// `Dft` with an asymptotically faster transform, which only matters well
/// past the default sizes.
pub const DET_METHODS_DEFAULT: [DetMethod; 3] =
    [DetMethod::Closed, DetMethod::Bareiss, DetMethod::Dft];

impl DetMethod {
    pub fn name(self) -> &'static str {
        match self {
            DetMethod::Closed => "closed",
            DetMethod::Bareiss => "bareiss",
            DetMethod::Dft => "dft",
            DetMethod::Fft => "fft",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InverseMethod {
    Gauss,
    Structured,
    Dft,
}

pub const INVERSE_METHODS_DEFAULT: [InverseMethod; 3] = [
    InverseMethod::Gauss,
    InverseMethod::Structured,
    InverseMethod::Dft,
];

impl InverseMethod {
    pub fn name(self) -> &'static str {
        match self {
            InverseMethod::Gauss => "gauss",
            InverseMethod::Structured => "structured",
            InverseMethod::Dft => "dft",
        }
    }
}

/// A determinant too large for f64: sign and log2 of the magnitude.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FloatDet {
    pub log2_abs: f64,
    pub sign: i8,
}

impl FloatDet {
    pub fn from_rational(x: &Rational) -> Self {
        match x.log2_abs() {
            None => FloatDet {
                log2_abs: f64::NEG_INFINITY,
                sign: 0,
            },
            Some(log2_abs) => FloatDet {
                log2_abs,
                sign: if x.is_negative() { -1 } else { 1 },
            },
        }
    }

    /// Product of the eigenvalues accumulated in log-polar form, so the
    /// magnitude never overflows. The matrix is real, so the accumulated
    /// argument lands near a multiple of π and fixes the sign.
    pub fn from_eigenvalues(lambdas: &[Complex64]) -> Self {
        let mut log2_abs = 0.0;
        let mut arg = 0.0;
        for l in lambdas {
            let norm = l.norm();
            if norm == 0.0 {
                return FloatDet {
                    log2_abs: f64::NEG_INFINITY,
                    sign: 0,
                };
            }
            log2_abs += norm.ln() / std::f64::consts::LN_2;
            arg += l.arg();
        }
        FloatDet {
            log2_abs,
            sign: if arg.cos() >= 0.0 { 1 } else { -1 },
        }
    }

    /// Log-domain agreement with an exact value at relative tolerance
    /// `rel`: |printed/oracle − 1| ≤ rel, i.e. log2 magnitudes within
    /// log2(1 + rel), with matching signs.
    pub fn matches_exact(&self, oracle: &Rational, rel: f64) -> bool {
        match oracle.log2_abs() {
            None => self.sign == 0,
            Some(log2_oracle) => {
                let sign_oracle = if oracle.is_negative() { -1 } else { 1 };
                self.sign == sign_oracle
                    && (self.log2_abs - log2_oracle).abs() <= (1.0 + rel).log2()
            }
        }
    }
}

/// One value a benchmarked method produced, in whatever arithmetic it
/// runs in. Digests canonicalize the value so identical results hash
/// identically across runs.
enum CellValue {
    Exact(Rational),
    ExactRow(Vec<Rational>),
    Float(FloatDet),
    FloatRow(Vec<f64>),
}

impl CellValue {
    fn canonical(&self) -> String {
        match self {
            CellValue::Exact(x) => x.to_string(),
            CellValue::ExactRow(row) => {
                let mut s = String::new();
                for (i, x) in row.iter().enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    let _ = write!(s, "{x}");
                }
                s
            }
            // log2 magnitude rounded to 1e-6 so dft and fft digests agree
            CellValue::Float(f) => format!("{}x2^{:.6}", f.sign, f.log2_abs),
            CellValue::FloatRow(row) => {
                let mut s = String::new();
                for (i, x) in row.iter().enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    let _ = write!(s, "{x:.12e}");
                }
                s
            }
        }
    }

    fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical().as_bytes());
        let mut hex = String::with_capacity(16);
        for byte in &hash[..8] {
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchCell {
    pub method: &'static str,
    pub n: usize,
    pub entry_bits_max: u64,
    pub median_ns: u64,
    pub min_ns: u64,
    pub value_digest: String,
    pub validated: bool,
    pub timed_out: bool,
    pub samples: usize,
}

/// Median-vs-baseline slowdown for one method at one size.
#[derive(Clone, Debug, Serialize)]
pub struct MethodRatio {
    pub n: usize,
    pub method: &'static str,
    pub baseline: &'static str,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub kind: &'static str,
    pub params: HoradamParams,
    pub repeat: usize,
    pub timeout_secs: u64,
    pub cells: Vec<BenchCell>,
    pub ratios: Vec<MethodRatio>,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub repeat: usize,
    pub timeout: Duration,
    pub det_methods: Vec<DetMethod>,
    pub inverse_methods: Vec<InverseMethod>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            repeat: 3,
            timeout: timeout_from_env(),
            det_methods: DET_METHODS_DEFAULT.to_vec(),
            inverse_methods: INVERSE_METHODS_DEFAULT.to_vec(),
        }
    }
}

/// Per-cell wall budget: `HORACIRC_TIMEOUT_SECS` when set and parseable,
/// 60 s otherwise.
pub fn timeout_from_env() -> Duration {
    let secs = std::env::var("HORACIRC_TIMEOUT_SECS")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(DEFAULT_TIMEOUT_SECS);
    Duration::from_secs(secs)
}

struct TimedRun {
    value: CellValue,
    median_ns: u64,
    min_ns: u64,
    timed_out: bool,
    samples: usize,
}

/// One warm-up evaluation (its value is kept for validation, its duration
/// only used if the budget already ran out), then up to `repeat` timed
/// repetitions with a budget check between them.
fn time_cell<F: FnMut() -> CellValue>(mut f: F, repeat: usize, timeout: Duration) -> TimedRun {
    let start = Instant::now();
    let warmup_start = Instant::now();
    let value = f();
    let warmup_ns = warmup_start.elapsed().as_nanos() as u64;

    let mut samples: Vec<u64> = Vec::with_capacity(repeat);
    while samples.len() < repeat && start.elapsed() < timeout {
        let t = Instant::now();
        let v = f();
        samples.push(t.elapsed().as_nanos() as u64);
        std::hint::black_box(&v);
    }
    let timed_out = samples.len() < repeat;
    samples.sort_unstable();
    let (median_ns, min_ns) = if samples.is_empty() {
        // budget exhausted by the validation pass; report its duration
        (warmup_ns, warmup_ns)
    } else {
        (samples[samples.len() / 2], samples[0])
    };
    TimedRun {
        value,
        median_ns,
        min_ns,
        timed_out,
        samples: samples.len(),
    }
}

fn push_ratios(cells: &[BenchCell], baseline: &'static str, ratios: &mut Vec<MethodRatio>) {
    for cell in cells {
        if cell.method == baseline {
            continue;
        }
        if let Some(base) = cells
            .iter()
            .find(|c| c.n == cell.n && c.method == baseline)
        {
            if base.median_ns > 0 {
                ratios.push(MethodRatio {
                    n: cell.n,
                    method: cell.method,
                    baseline,
                    ratio: cell.median_ns as f64 / base.median_ns as f64,
                });
            }
        }
    }
}

fn check_sizes(sizes: &[usize], repeat: usize) -> Result<()> {
    if repeat == 0 {
        return Err(Error::InvalidArgument("repeat must be at least 1".into()));
    }
    if let Some(&n) = sizes.iter().find(|&&n| n < 3) {
        return Err(Error::UnsupportedDimension { n, min: 3 });
    }
    Ok(())
}

/// Eigenvalues via an FFT plan instead of the O(n²) direct sum. The
/// unnormalized inverse transform Σ c_k e^{+2πijk/n} is exactly the
/// eigenvalue convention used everywhere else.
pub fn fft_eigenvalues(circ: &Circulant) -> Vec<Complex64> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(circ.n());
    let mut buffer: Vec<Complex64> = circ
        .first_row()
        .iter()
        .map(|c| Complex64::new(c.to_f64(), 0.0))
        .collect();
    fft.process(&mut buffer);
    buffer
}

pub fn bench_det(
    params: &HoradamParams,
    sizes: &[usize],
    config: &BenchConfig,
) -> Result<BenchReport> {
    check_sizes(sizes, config.repeat)?;
    let mut cells = Vec::new();
    for &n in sizes {
        let circ = Circulant::from_params(params, n)?;
        let bits = circ.max_entry_bits();
        let reference = det_eq3(params, n)?;
        for &method in &config.det_methods {
            let run = match method {
                DetMethod::Closed => time_cell(
                    || CellValue::Exact(det_eq3(params, n).expect("n checked")),
                    config.repeat,
                    config.timeout,
                ),
                DetMethod::Bareiss => {
                    let dense = circ.materialize();
                    time_cell(
                        || CellValue::Exact(bareiss_det(&dense).expect("square")),
                        config.repeat,
                        config.timeout,
                    )
                }
                DetMethod::Dft => time_cell(
                    || CellValue::Float(FloatDet::from_eigenvalues(&dft_eigenvalues(&circ))),
                    config.repeat,
                    config.timeout,
                ),
                DetMethod::Fft => time_cell(
                    || CellValue::Float(FloatDet::from_eigenvalues(&fft_eigenvalues(&circ))),
                    config.repeat,
                    config.timeout,
                ),
            };
            let validated = match &run.value {
                CellValue::Exact(x) => *x == reference,
                CellValue::Float(f) => f.matches_exact(&reference, FLOAT_REL_TOL),
                _ => false,
            };
            cells.push(BenchCell {
                method: method.name(),
                n,
                entry_bits_max: bits,
                median_ns: run.median_ns,
                min_ns: run.min_ns,
                value_digest: run.value.digest(),
                validated,
                timed_out: run.timed_out,
                samples: run.samples,
            });
        }
    }
    let mut ratios = Vec::new();
    push_ratios(&cells, DetMethod::Closed.name(), &mut ratios);
    Ok(BenchReport {
        kind: "det",
        params: params.clone(),
        repeat: config.repeat,
        timeout_secs: config.timeout.as_secs(),
        cells,
        ratios,
    })
}

pub fn bench_inverse(
    params: &HoradamParams,
    sizes: &[usize],
    config: &BenchConfig,
) -> Result<BenchReport> {
    check_sizes(sizes, config.repeat)?;
    let mut cells = Vec::new();
    for &n in sizes {
        let circ = Circulant::from_params(params, n)?;
        let bits = circ.max_entry_bits();
        let dense = circ.materialize();
        let reference = gauss_inverse(&dense)?
            .as_circulant_first_row()
            .expect("inverse of a circulant is circulant");
        for &method in &config.inverse_methods {
            let run = match method {
                InverseMethod::Gauss => time_cell(
                    || {
                        CellValue::ExactRow(
                            gauss_inverse(&dense)
                                .expect("nonsingular checked above")
                                .row(0)
                                .to_vec(),
                        )
                    },
                    config.repeat,
                    config.timeout,
                ),
                InverseMethod::Structured => time_cell(
                    || {
                        let si = structured_inverse(params, n).expect("nonsingular");
                        CellValue::ExactRow(si.candidate.row(0).to_vec())
                    },
                    config.repeat,
                    config.timeout,
                ),
                InverseMethod::Dft => time_cell(
                    || {
                        CellValue::FloatRow(
                            dft_inverse(&circ)
                                .expect("nonsingular")
                                .iter()
                                .map(|c| c.re)
                                .collect(),
                        )
                    },
                    config.repeat,
                    config.timeout,
                ),
            };
            // gauss returns the inverse's row 0 = (w₁, w₂, …); the exact
            // reference has it directly, floats compare entrywise
            let validated = match &run.value {
                CellValue::ExactRow(row) => *row == reference,
                CellValue::FloatRow(row) => {
                    row.len() == reference.len()
                        && row.iter().zip(reference.iter()).all(|(x, r)| {
                            let r = r.to_f64();
                            (x - r).abs() <= FLOAT_REL_TOL * r.abs().max(1.0)
                        })
                }
                _ => false,
            };
            cells.push(BenchCell {
                method: method.name(),
                n,
                entry_bits_max: bits,
                median_ns: run.median_ns,
                min_ns: run.min_ns,
                value_digest: run.value.digest(),
                validated,
                timed_out: run.timed_out,
                samples: run.samples,
            });
        }
    }
    let mut ratios = Vec::new();
    push_ratios(&cells, InverseMethod::Gauss.name(), &mut ratios);
    Ok(BenchReport {
        kind: "inverse",
        params: params.clone(),
        repeat: config.repeat,
        timeout_secs: config.timeout.as_secs(),
        cells,
        ratios,
    })
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,n,entry_bits_max,median_ns,min_ns,value_digest,validated\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.method, c.n, c.entry_bits_max, c.median_ns, c.min_ns, c.value_digest, c.validated
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
