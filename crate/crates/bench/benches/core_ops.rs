use std::hint::black_box;

use criterion::{BenchmarkId, Criterion, criterion_group, criterion_main};
use fgs_bench::{hopping_ground_state, random_skew, random_spectrum, tfi_compact, thermal_state};
use fgs_core::compression::rbd;
use fgs_core::dynamics::evolve;
use fgs_core::hamiltonian::diag_h;
use fgs_core::linalg::pfaffian;

fn bench_diag_h(c: &mut Criterion) {
    let mut group = c.benchmark_group("diag_h");
    for n in [16, 64, 128] {
        let h = tfi_compact(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| b.iter(|| diag_h(black_box(h)).unwrap()));
    }
    group.finish();
}

fn bench_pfaffian(c: &mut Criterion) {
    let mut group = c.benchmark_group("pfaffian");
    for n in [6, 24, 64] {
        let a = random_skew(n, 11);
        group.bench_with_input(BenchmarkId::from_parameter(2 * n), &a, |b, a| b.iter(|| pfaffian(black_box(a)).unwrap()));
    }
    group.finish();
}

fn bench_evolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolve");
    for n in [16, 64] {
        let g = thermal_state(n, 3);
        let spec = random_spectrum(n, 4);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| evolve(black_box(&g), &spec, 1.3).unwrap())
        });
    }
    group.finish();
}

fn bench_rbd(c: &mut Criterion) {
    let mut group = c.benchmark_group("rbd");
    group.sample_size(10);
    for (n, m) in [(100, 2), (200, 5)] {
        let l = hopping_ground_state(n);
        group.bench_with_input(BenchmarkId::new(format!("m{m}"), n), &l, |b, l| b.iter(|| rbd(black_box(l), m).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_diag_h, bench_pfaffian, bench_evolve, bench_rbd);
criterion_main!(benches);
