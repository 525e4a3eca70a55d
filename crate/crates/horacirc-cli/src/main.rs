//! `horacirc` — batch frontend over the library: sequence terms, exact
//! determinants and inverses, grid audits of the printed formulas, and
//! method benchmarks.
//!
//! Exit codes: 0 success (and audit internally consistent), 2 usage,
//! 3 degenerate denominator, 4 singular matrix.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use horacirc::audit::{self, Convention, FormulaId, GridSpec};
use horacirc::bench::{
    bench_det, bench_inverse, timeout_from_env, BenchConfig, DetMethod, FloatDet, InverseMethod,
    DET_METHODS_DEFAULT, INVERSE_METHODS_DEFAULT,
};
use horacirc::closed_form::{det_eq3, det_via_gn};
use horacirc::decomposition::structured_inverse;
use horacirc::oracle::{bareiss_det, dft_eigenvalues, dft_inverse, gauss_inverse};
use horacirc::{Circulant, Error, HoradamParams, Preset, Rational};

#[derive(Parser)]
#[command(
    name = "horacirc",
    version,
    about = "Exact determinants and inverses of circulants with Horadam-sequence first rows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the terms W(0)..W(count)
    Seq(SeqArgs),
    /// Determinant of the n-by-n circulant circ(W(1),...,W(n))
    Det(DetArgs),
    /// First row of the inverse circulant
    Inv(InvArgs),
    /// Compare printed formulas against oracles over a parameter grid
    Audit(AuditArgs),
    /// Time determinant or inverse strategies; emits CSV/JSON
    Bench(BenchArgs),
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_formula(s: &str) -> Result<FormulaId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Recurrence parameters: a named preset or all four raw values.
#[derive(Args, Clone)]
struct ParamArgs {
    /// fibonacci, lucas, pell, or pell-lucas
    #[arg(long, value_parser = parse_preset, conflicts_with_all = ["a", "b", "p", "q"])]
    preset: Option<Preset>,
    /// W(0)
    #[arg(long, allow_negative_numbers = true)]
    a: Option<i64>,
    /// W(1)
    #[arg(long, allow_negative_numbers = true)]
    b: Option<i64>,
    /// Coefficient on W(k-1)
    #[arg(long, allow_negative_numbers = true)]
    p: Option<i64>,
    /// Coefficient on W(k-2)
    #[arg(long, allow_negative_numbers = true)]
    q: Option<i64>,
}

impl ParamArgs {
    fn resolve(&self) -> horacirc::Result<HoradamParams> {
        if let Some(preset) = self.preset {
            return Ok(preset.params());
        }
        match (self.a, self.b, self.p, self.q) {
            (Some(a), Some(b), Some(p), Some(q)) => Ok(HoradamParams::new(a, b, p, q)),
            _ => Err(Error::InvalidArgument(
                "provide --preset or all of --a, --b, --p, --q".to_string(),
            )),
        }
    }

    fn resolve_or_default(&self, fallback: Preset) -> horacirc::Result<HoradamParams> {
        if self.preset.is_none() && self.a.is_none() && self.b.is_none() && self.p.is_none() && self.q.is_none()
        {
            return Ok(fallback.params());
        }
        self.resolve()
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SeqMethod {
    Recurrence,
    Binet,
}

#[derive(Args)]
struct SeqArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Largest index to print: terms W(0)..W(count)
    #[arg(long)]
    count: usize,
    #[arg(long, value_enum, default_value = "recurrence")]
    method: SeqMethod,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetCmdMethod {
    /// Direct closed form (exact, division-free)
    Closed,
    /// Scalar-chain route b·(W1-W(n+1))^(n-2)·g_n (exact; can be degenerate)
    Gn,
    /// Fraction-free elimination oracle (exact)
    Bareiss,
    /// Eigenvalue product in floating point
    Dft,
}

#[derive(Args)]
struct DetArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Circulant dimension (n >= 3)
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "closed")]
    method: DetCmdMethod,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum InvCmdMethod {
    /// Exact elimination oracle (default: correctness first)
    Gauss,
    /// Transform pipeline transcribed from the printed decomposition,
    /// with its validity verdict
    Structured,
    /// The printed entry formulas w1, w2, w3, w4, w5, wn
    Printed,
    /// Eigenvalue-reciprocal route in floating point
    Dft,
}

#[derive(Args)]
struct InvArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Circulant dimension (n >= 3)
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "gauss")]
    method: InvCmdMethod,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    PlusQ,
    MinusQ,
}

#[derive(Args)]
struct AuditArgs {
    /// Pin the grid to one preset's (a, b, p, q)
    #[arg(long, value_parser = parse_preset, conflicts_with_all = [
        "a_min", "a_max", "b_min", "b_max", "p", "q",
    ])]
    preset: Option<Preset>,
    #[arg(long, allow_negative_numbers = true)]
    a_min: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    a_max: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    b_min: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    b_max: Option<i64>,
    /// Comma-separated p values
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<i64>>,
    /// Comma-separated q values
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<i64>>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Restrict to these formula ids (comma-separated); default: all
    #[arg(long, value_delimiter = ',', value_parser = parse_formula)]
    formula: Option<Vec<FormulaId>>,
    /// Recurrence sign convention; minus-q audits W(k) = pW(k-1) - qW(k-2)
    #[arg(long, value_enum, default_value = "plus-q")]
    convention: ConventionArg,
    /// Write the full per-case JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the summary as JSON instead of a table
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(subcommand)]
    target: BenchTarget,
}

#[derive(Subcommand)]
enum BenchTarget {
    /// Determinant methods (closed, bareiss, dft; fft opt-in)
    Det(BenchRunArgs),
    /// Inverse methods (gauss, structured, dft)
    Inverse(BenchRunArgs),
}

#[derive(Args)]
struct BenchRunArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Comma-separated dimensions; empty gives an empty report
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Timed repetitions per cell (one warm-up/validation pass extra)
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    /// Override the method list (comma-separated)
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Write CSV here (also printed to stdout unless --json)
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Write the JSON mirror here
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Print JSON to stdout instead of CSV
    #[arg(long)]
    json: bool,
}

#[derive(Serialize)]
struct SeqOut<'a> {
    params: &'a HoradamParams,
    method: &'static str,
    count: usize,
    terms: Vec<String>,
}

#[derive(Serialize)]
struct FloatOut {
    /// sign * 2^log2_abs when that fits in an f64
    value: Option<f64>,
    log2_abs: f64,
    sign: i8,
}

#[derive(Serialize)]
struct DetOut<'a> {
    params: &'a HoradamParams,
    n: usize,
    method: &'static str,
    det: Option<String>,
    float: Option<FloatOut>,
}

#[derive(Serialize)]
struct PrintedEntryOut {
    name: &'static str,
    position: usize,
    value: String,
}

#[derive(Serialize)]
struct InvOut<'a> {
    params: &'a HoradamParams,
    n: usize,
    method: &'static str,
    first_row: Option<Vec<String>>,
    first_row_float: Option<Vec<f64>>,
    valid: Option<bool>,
    failure: Option<String>,
    entries: Option<Vec<PrintedEntryOut>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Degenerate { .. } | Error::RepeatedRoot => 3,
        Error::Singular | Error::NumericallySingular { .. } => 4,
        _ => 2,
    }
}

fn run(cli: Cli) -> horacirc::Result<ExitCode> {
    match cli.command {
        Command::Seq(args) => cmd_seq(args),
        Command::Det(args) => cmd_det(args),
        Command::Inv(args) => cmd_inv(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Bench(args) => match args.target {
            BenchTarget::Det(run_args) => cmd_bench(run_args, true),
            BenchTarget::Inverse(run_args) => cmd_bench(run_args, false),
        },
    }
}

fn cmd_seq(args: SeqArgs) -> horacirc::Result<ExitCode> {
    let params = args.params.resolve()?;
    let (method, terms): (&'static str, Vec<String>) = match args.method {
        SeqMethod::Recurrence => (
            "recurrence",
            params
                .seq(args.count + 1)
                .iter()
                .map(|t| t.to_string())
                .collect(),
        ),
        SeqMethod::Binet => {
            let mut terms = Vec::with_capacity(args.count + 1);
            for k in 0..=args.count {
                terms.push(params.binet(k)?.to_string());
            }
            ("binet", terms)
        }
    };
    if args.json {
        let out = SeqOut {
            params: &params,
            method,
            count: args.count,
            terms,
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    } else {
        println!("{}", terms.join(" "));
    }
    Ok(ExitCode::SUCCESS)
}

fn float_out(fd: FloatDet) -> FloatOut {
    let value = if fd.sign == 0 {
        Some(0.0)
    } else if fd.log2_abs < f64::MAX_EXP as f64 {
        Some(fd.sign as f64 * fd.log2_abs.exp2())
    } else {
        None
    };
    FloatOut {
        value,
        log2_abs: fd.log2_abs,
        sign: fd.sign,
    }
}

fn cmd_det(args: DetArgs) -> horacirc::Result<ExitCode> {
    let params = args.params.resolve()?;
    let (method, exact, float): (&'static str, Option<Rational>, Option<FloatOut>) =
        match args.method {
            DetCmdMethod::Closed => ("closed", Some(det_eq3(&params, args.n)?), None),
            DetCmdMethod::Gn => ("gn", Some(det_via_gn(&params, args.n)?), None),
            DetCmdMethod::Bareiss => {
                let circ = Circulant::from_params(&params, args.n)?;
                ("bareiss", Some(bareiss_det(&circ.materialize())?), None)
            }
            DetCmdMethod::Dft => {
                let circ = Circulant::from_params(&params, args.n)?;
                let fd = FloatDet::from_eigenvalues(&dft_eigenvalues(&circ));
                ("dft", None, Some(float_out(fd)))
            }
        };
    if args.json {
        let out = DetOut {
            params: &params,
            n: args.n,
            method,
            det: exact.as_ref().map(Rational::to_string),
            float,
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    } else {
        eprintln!("# determinant via {method}, n = {}", args.n);
        match (&exact, &float) {
            (Some(d), _) => println!("{d}"),
            (None, Some(f)) => match f.value {
                Some(v) => println!("{v}"),
                None => println!("{}x2^{}", f.sign, f.log2_abs),
            },
            (None, None) => unreachable!("every method produces a value"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// The printed inverse entries that exist at dimension n, with their
/// 1-based first-row positions.
fn printed_entries(params: &HoradamParams, n: usize) -> horacirc::Result<Vec<PrintedEntryOut>> {
    let mut plan: Vec<(&'static str, usize, FormulaId)> = vec![
        ("w1", 1, FormulaId::Thm2W1),
        ("w2", 2, FormulaId::Thm2W2),
        ("w3", 3, FormulaId::Thm2W3),
    ];
    if n >= 4 {
        plan.push(("w4", 4, FormulaId::Thm2W4));
    }
    if n >= 5 {
        plan.push(("w5", 5, FormulaId::Thm2W5));
    }
    plan.push(("wn", n, FormulaId::Thm2Wn));
    let mut entries = Vec::with_capacity(plan.len());
    for (name, position, id) in plan {
        entries.push(PrintedEntryOut {
            name,
            position,
            value: audit::eval_thm2_entry(params, n, id)?.to_string(),
        });
    }
    Ok(entries)
}

fn cmd_inv(args: InvArgs) -> horacirc::Result<ExitCode> {
    let params = args.params.resolve()?;
    let n = args.n;
    let mut out = InvOut {
        params: &params,
        n,
        method: "",
        first_row: None,
        first_row_float: None,
        valid: None,
        failure: None,
        entries: None,
    };
    match args.method {
        InvCmdMethod::Gauss => {
            out.method = "gauss";
            let circ = Circulant::from_params(&params, n)?;
            let inv = gauss_inverse(&circ.materialize())?;
            out.first_row = Some(inv.row(0).iter().map(Rational::to_string).collect());
        }
        InvCmdMethod::Structured => {
            out.method = "structured";
            let si = structured_inverse(&params, n)?;
            out.first_row = Some(si.candidate.row(0).iter().map(Rational::to_string).collect());
            out.valid = Some(si.valid);
            out.failure = si.failure.as_ref().map(|f| {
                format!(
                    "{} check failed at ({}, {}): got {}, expected {}",
                    f.check, f.row, f.col, f.got, f.expected
                )
            });
        }
        InvCmdMethod::Printed => {
            out.method = "printed";
            out.entries = Some(printed_entries(&params, n)?);
        }
        InvCmdMethod::Dft => {
            out.method = "dft";
            let circ = Circulant::from_params(&params, n)?;
            out.first_row_float = Some(dft_inverse(&circ)?.iter().map(|c| c.re).collect());
        }
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
        return Ok(ExitCode::SUCCESS);
    }
    eprintln!("# inverse first row via {}, n = {n}", out.method);
    if let Some(row) = &out.first_row {
        println!("{}", row.join(" "));
    }
    if let Some(row) = &out.first_row_float {
        let rendered: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        println!("{}", rendered.join(" "));
    }
    if let Some(valid) = out.valid {
        match &out.failure {
            Some(f) => println!("valid: {valid} ({f})"),
            None => println!("valid: {valid}"),
        }
    }
    if let Some(entries) = &out.entries {
        for e in entries {
            println!("{} (entry {}) = {}", e.name, e.position, e.value);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_audit(args: AuditArgs) -> horacirc::Result<ExitCode> {
    let mut spec = GridSpec::default();
    if let Some(preset) = args.preset {
        let (a, b, p, q) = preset.raw();
        spec.a_min = a;
        spec.a_max = a;
        spec.b_min = b;
        spec.b_max = b;
        spec.p_values = vec![p];
        spec.q_values = vec![q];
    }
    if let Some(v) = args.a_min {
        spec.a_min = v;
    }
    if let Some(v) = args.a_max {
        spec.a_max = v;
    }
    if let Some(v) = args.b_min {
        spec.b_min = v;
    }
    if let Some(v) = args.b_max {
        spec.b_max = v;
    }
    if let Some(v) = args.p {
        spec.p_values = v;
    }
    if let Some(v) = args.q {
        spec.q_values = v;
    }
    if let Some(v) = args.n_min {
        spec.n_min = v;
    }
    if let Some(v) = args.n_max {
        spec.n_max = v;
    }
    if let Some(v) = args.formula {
        spec.formulas = v;
    }
    spec.convention = match args.convention {
        ConventionArg::PlusQ => Convention::PlusQ,
        ConventionArg::MinusQ => Convention::MinusQ,
    };
    if spec.a_min > spec.a_max || spec.b_min > spec.b_max || spec.n_min > spec.n_max {
        return Err(Error::InvalidArgument(
            "empty grid: check --a-min/--a-max, --b-min/--b-max, --n-min/--n-max".to_string(),
        ));
    }
    if spec.n_min < 3 {
        return Err(Error::UnsupportedDimension {
            n: spec.n_min,
            min: 3,
        });
    }

    let reports = audit::run_grid(&spec);
    let summary = audit::summarize(&reports);
    if let Some(path) = &args.out {
        let payload = serde_json::to_string_pretty(&reports).expect("reports serialize");
        std::fs::write(path, payload).map_err(|e| {
            Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))
        })?;
        eprintln!("# wrote {} case reports to {}", reports.len(), path.display());
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&summary).expect("serializes"));
    } else {
        println!("{summary}");
    }
    Ok(if summary.is_consistent() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn parse_det_methods(names: &[String]) -> horacirc::Result<Vec<DetMethod>> {
    names
        .iter()
        .map(|s| match s.as_str() {
            "closed" => Ok(DetMethod::Closed),
            "bareiss" => Ok(DetMethod::Bareiss),
            "dft" => Ok(DetMethod::Dft),
            "fft" => Ok(DetMethod::Fft),
            other => Err(Error::InvalidArgument(format!(
                "unknown det method {other:?} (closed, bareiss, dft, fft)"
            ))),
        })
        .collect()
}

fn parse_inverse_methods(names: &[String]) -> horacirc::Result<Vec<InverseMethod>> {
    names
        .iter()
        .map(|s| match s.as_str() {
            "gauss" => Ok(InverseMethod::Gauss),
            "structured" => Ok(InverseMethod::Structured),
            "dft" => Ok(InverseMethod::Dft),
            other => Err(Error::InvalidArgument(format!(
                "unknown inverse method {other:?} (gauss, structured, dft)"
            ))),
        })
        .collect()
}

fn cmd_bench(args: BenchRunArgs, det: bool) -> horacirc::Result<ExitCode> {
    let params = args.params.resolve_or_default(Preset::Fibonacci)?;
    let mut config = BenchConfig {
        repeat: args.repeat,
        timeout: timeout_from_env(),
        det_methods: DET_METHODS_DEFAULT.to_vec(),
        inverse_methods: INVERSE_METHODS_DEFAULT.to_vec(),
    };
    if let Some(names) = &args.methods {
        if det {
            config.det_methods = parse_det_methods(names)?;
        } else {
            config.inverse_methods = parse_inverse_methods(names)?;
        }
    }
    let report = if det {
        bench_det(&params, &args.sizes, &config)?
    } else {
        bench_inverse(&params, &args.sizes, &config)?
    };
    if let Some(path) = &args.out_csv {
        std::fs::write(path, report.to_csv()).map_err(|e| {
            Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))
        })?;
        eprintln!("# wrote CSV to {}", path.display());
    }
    if let Some(path) = &args.out_json {
        std::fs::write(path, report.to_json()).map_err(|e| {
            Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))
        })?;
        eprintln!("# wrote JSON to {}", path.display());
    }
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_csv());
    }
    Ok(ExitCode::SUCCESS)
}
