use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use ntqpt::quench::QuenchContext;
use ntqpt::scaling::{initial_coupling_range, target_energy};
use ntqpt::spectral::{diagonalize_by_parity, with_semiclassical_pairing};
use ntqpt::ModelSpec;

fn quench(c: &mut Criterion) {
    let spec = ModelSpec::lmg(1000, 0.7);
    let ctx = QuenchContext::new(with_semiclassical_pairing(diagonalize_by_parity(&spec).unwrap()), 1.0).unwrap();
    let range = initial_coupling_range(&spec);
    let target = ctx.critical_excitation();

    let mut group = c.benchmark_group("quench_lmg_N1000");
    group.sample_size(20);
    group.bench_function("context", |b| {
        b.iter(|| QuenchContext::new(with_semiclassical_pairing(diagonalize_by_parity(black_box(&spec)).unwrap()), 1.0).unwrap())
    });
    group.bench_function("single", |b| b.iter(|| ctx.quench(black_box(0.4), 1).unwrap()));
    group.bench_function("targeted", |b| b.iter(|| target_energy(&ctx, black_box(target), 1, range).unwrap()));
    group.finish();
}

criterion_group!(benches, quench);
criterion_main!(benches);
