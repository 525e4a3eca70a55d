//! Shared fixtures for the criterion benchmarks.

use horacirc::{Circulant, DenseMatrix, HoradamParams, Preset};

/// The workload everything is measured on.
pub fn params() -> HoradamParams {
    Preset::Fibonacci.params()
}

pub fn circulant(n: usize) -> Circulant {
    Circulant::from_params(&params(), n).expect("n >= 3")
}

pub fn dense(n: usize) -> DenseMatrix {
    circulant(n).materialize()
}
