use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heunband::antikraw::{analyze_antikraw, Ansatz};
use heunband::contdisc::{kernel_matrix_quadrature, make_family, FamilyKind};
use heunband::leonard::make_krawtchouk;
use heunband::limiting::analyze_discrete;
use heunband::linalg::sym_eigen;
use heunband::SymmetricMatrix;

fn bench_sym_eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("sym_eigen");
    for n in [16, 64, 128] {
        // Smooth, well-conditioned test matrix with a spread-out spectrum.
        let a = SymmetricMatrix::from_lower_fn(n, |i, j| if i == j { i as f64 } else { 1.0 / (1.0 + (i - j) as f64) })
            .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| sym_eigen(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn bench_discrete(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze_discrete");
    for (n, j1, j2) in [(20, 7, 11), (40, 15, 22)] {
        let pair = make_krawtchouk(n, 0.3).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &pair, |b, pair| {
            b.iter(|| analyze_discrete(black_box(pair), j1, j2).unwrap())
        });
    }
    group.finish();
}

fn bench_quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_quadrature");
    group.sample_size(20);
    let cases = [
        ("jacobi", FamilyKind::Jacobi { alpha: 0.0, beta: 0.0 }, 0.3),
        ("hermite", FamilyKind::Hermite, 0.5),
        ("laguerre_singular", FamilyKind::Laguerre { alpha: -0.5 }, 1.5),
    ];
    for (name, kind, w) in cases {
        let family = make_family(kind).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| kernel_matrix_quadrature(&family, 10, black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn bench_antikraw(c: &mut Criterion) {
    c.bench_function("analyze_antikraw/pentadiagonal_8", |b| {
        b.iter(|| analyze_antikraw(black_box(8), 3, 5, Ansatz::Pentadiagonal).unwrap())
    });
}

criterion_group!(linalg, bench_sym_eigen);
criterion_group!(pipelines, bench_discrete, bench_quadrature, bench_antikraw);
criterion_main!(linalg, pipelines);
