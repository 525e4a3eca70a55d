//! Inverse strategies: the exact elimination oracle, the transform
//! pipeline (which also verifies its own product), and the floating
//! eigenvalue-reciprocal route.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use horacirc::decomposition::structured_inverse;
use horacirc::oracle::{dft_inverse, gauss_inverse};
use horacirc_bench::{circulant, dense, params};

fn inverse_methods(c: &mut Criterion) {
    let params = params();
    let mut group = c.benchmark_group("inverse");
    group.sample_size(10);
    for n in [8usize, 16] {
        let circ = circulant(n);
        let matrix = dense(n);
        group.bench_with_input(BenchmarkId::new("gauss", n), &matrix, |b, m| {
            b.iter(|| black_box(gauss_inverse(m).expect("nonsingular")))
        });
        group.bench_with_input(BenchmarkId::new("structured", n), &n, |b, &n| {
            b.iter(|| black_box(structured_inverse(&params, n).expect("nonsingular")))
        });
        group.bench_with_input(BenchmarkId::new("dft", n), &circ, |b, circ| {
            b.iter(|| black_box(dft_inverse(circ).expect("nonsingular")))
        });
    }
    group.finish();
}

criterion_group!(benches, inverse_methods);
criterion_main!(benches);
