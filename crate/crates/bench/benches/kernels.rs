use std::hint::black_box;

use adiakit::models::CouplingAxis;
use adiakit::norm::induced_trace_norm;
use adiakit::spectral::{analyze, projector_derivative};
use adiakit::tabulate::TabulatedFamily;
use adiakit::{zero_projector, LiouvillianFamily, SpectralConfig};
use adiakit_bench::{example1, example2};
use criterion::{criterion_group, criterion_main, Criterion};

fn generators(c: &mut Criterion) {
    let ex1 = example1();
    let ex2 = example2(CouplingAxis::Y);
    let table = TabulatedFamily::new(&ex2, 1e-13).unwrap();
    let mut g = c.benchmark_group("generator");
    g.bench_function("example1", |b| b.iter(|| ex1.generator(black_box(0.37)).unwrap()));
    g.bench_function("example2_direct", |b| b.iter(|| ex2.generator(black_box(0.37)).unwrap()));
    g.bench_function("example2_tabulated", |b| b.iter(|| table.generator(black_box(0.37)).unwrap()));
    g.finish();
}

fn spectral(c: &mut Criterion) {
    let ex2 = example2(CouplingAxis::Y);
    let cfg = SpectralConfig::default();
    let l = ex2.generator(0.5).unwrap();
    let mut g = c.benchmark_group("spectral");
    g.bench_function("expm_4x4", |b| b.iter(|| black_box(&l).expm(0.1)));
    g.bench_function("zero_projector", |b| b.iter(|| zero_projector(black_box(&l), cfg.zero_tol).unwrap()));
    g.bench_function("analyze", |b| b.iter(|| analyze(&ex2, black_box(0.5), &cfg).unwrap()));
    g.bench_function("projector_derivative", |b| b.iter(|| projector_derivative(&ex2, black_box(0.5), &cfg).unwrap()));
    g.bench_function("induced_trace_norm", |b| b.iter(|| induced_trace_norm(black_box(&l))));
    g.finish();
}

criterion_group!(benches, generators, spectral);
criterion_main!(benches);
