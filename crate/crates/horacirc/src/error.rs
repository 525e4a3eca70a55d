//! One error type shared across the crate.

use std::fmt;

use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Exact division by a zero scalar (rational or quadratic element).
    DivisionByZero,
    /// Arithmetic between quadratic elements over different extensions.
    MismatchedDiscriminants { left: BigInt, right: BigInt },
    /// A quadratic element with a nonzero irrational part cannot be
    /// demoted to a rational.
    IrrationalResidue { d: BigInt },
    /// Binet evaluation needs two distinct roots, i.e. p^2 + 4q != 0.
    RepeatedRoot,
    /// A closed form divides by the named quantity and it vanished here.
    Degenerate { denominator: String },
    /// Exact inversion of a singular matrix.
    Singular,
    /// Floating inversion refused: an eigenvalue magnitude fell below the
    /// singularity threshold.
    NumericallySingular {
        index: usize,
        magnitude: f64,
        threshold: f64,
    },
    /// Operands whose shapes do not line up.
    DimensionMismatch { left: usize, right: usize },
    NotSquare { rows: usize, cols: usize },
    /// Dimension below the minimum an operation supports.
    UnsupportedDimension { n: usize, min: usize },
    InvalidArgument(String),
    ParseRational { input: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::MismatchedDiscriminants { left, right } => {
                write!(f, "mismatched discriminants: {left} vs {right}")
            }
            Error::IrrationalResidue { d } => {
                write!(f, "irrational residue: nonzero coefficient of sqrt({d})")
            }
            Error::RepeatedRoot => write!(f, "repeated root: p^2 + 4q = 0"),
            Error::Degenerate { denominator } => {
                write!(f, "degenerate case: {denominator} = 0")
            }
            Error::Singular => write!(f, "singular matrix"),
            Error::NumericallySingular {
                index,
                magnitude,
                threshold,
            } => write!(
                f,
                "numerically singular: |lambda_{index}| = {magnitude:e} is below threshold {threshold:e}"
            ),
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::NotSquare { rows, cols } => write!(f, "matrix is not square: {rows}x{cols}"),
            Error::UnsupportedDimension { n, min } => {
                write!(f, "dimension {n} is below the supported minimum {min}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::ParseRational { input } => write!(f, "invalid rational literal: {input:?}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
