//! Exact determinants and inverses for circulant matrices whose first row
//! is a Horadam sequence, plus machinery to audit the printed closed-form
//! expressions for them against independent oracles.

pub mod audit;
pub mod bench;
pub mod circulant;
pub mod closed_form;
pub mod decomposition;
pub mod error;
pub mod horadam;
pub mod matrix;
pub mod oracle;
pub mod quad;
pub mod rational;

pub use audit::{AuditReport, AuditSummary, Convention, FormulaId, GridSpec};
pub use bench::{BenchConfig, BenchReport, DetMethod, FloatDet, InverseMethod};
pub use circulant::Circulant;
pub use closed_form::HessenbergScalars;
pub use decomposition::{DecompositionBundle, StructuredInverse};
pub use error::{Error, Result};
pub use horadam::{HoradamParams, Preset};
pub use matrix::DenseMatrix;
pub use quad::QuadExt;
pub use rational::Rational;

#[cfg(test)]
pub(crate) mod test_oracles;
