//! Sequential vs. rayon execution of the three data-parallel hot paths.
//! Without the `parallel` feature both arms run the sequential code.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orbitsieve_core::experiments::{almost_prime_table, build_sequence, Counting};
use orbitsieve_core::modular::orbit_mod_q_with;
use orbitsieve_core::orbit::orbit_ball;
use orbitsieve_core::{presets, CoordinateFunction, EnumerationLimits, Execution};

const ARMS: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn limits(execution: Execution) -> EnumerationLimits {
    EnumerationLimits { execution, ..Default::default() }
}

fn orbit_ball_bench(c: &mut Criterion) {
    let spec = presets::pythagorean_full();
    let mut group = c.benchmark_group("orbit_ball_full_1e5");
    group.sample_size(20);
    for (name, exec) in ARMS {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| orbit_ball(black_box(&spec), 1e5, &limits(exec)).unwrap())
        });
    }
    group.finish();
}

fn orbit_mod_q_bench(c: &mut Criterion) {
    let spec = presets::aniso_3();
    let mut group = c.benchmark_group("orbit_mod_q_aniso_143");
    group.sample_size(10);
    for (name, exec) in ARMS {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| orbit_mod_q_with(black_box(&spec), 143, &limits(exec)).unwrap())
        });
    }
    group.finish();
}

fn almost_prime_bench(c: &mut Criterion) {
    let seq = build_sequence(
        &presets::pythagorean_full(),
        CoordinateFunction::CoordProduct,
        1e5,
        &EnumerationLimits::default(),
    )
    .unwrap();
    let rs: Vec<_> = (0..=30).map(Some).chain([None]).collect();
    let mut group = c.benchmark_group("almost_prime_table_1e5");
    for (name, exec) in ARMS {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| almost_prime_table(black_box(&seq), &rs, Counting::Multiplicity, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, orbit_ball_bench, orbit_mod_q_bench, almost_prime_bench);
criterion_main!(benches);
