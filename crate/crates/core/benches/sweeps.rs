use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fluctlim::convergence::{sweep, verify_moment_growth, verify_uniform_operator_bound, MomentGrowthGrid, UniformGrid};
use fluctlim::dynamics::QuadraticHamiltonian;
use fluctlim::exec::Exec;
use fluctlim::fock::TruncatedOperator;
use fluctlim::moments::Observable;
use fluctlim::C64;

fn modes() -> Vec<(&'static str, Exec)> {
    let mut out = vec![("sequential", Exec::Sequential)];
    if cfg!(feature = "parallel") {
        out.push(("parallel", Exec::Parallel));
    }
    out
}

fn dynamic_sweep(c: &mut Criterion) {
    let rho = TruncatedOperator::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
    let obs: Observable = "a".parse().unwrap();
    let h = QuadraticHamiltonian::harmonic();
    let ms: Vec<u32> = (16..=256).step_by(8).collect();
    let mut group = c.benchmark_group("dynamic_sweep");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sweep(black_box(&rho), 0.5, &obs, Some((&h, 0.02)), &ms, exec).unwrap())
        });
    }
    group.finish();
}

fn moment_growth_grid(c: &mut Criterion) {
    let h = QuadraticHamiltonian::squeezing();
    let grid = MomentGrowthGrid::default();
    let mut group = c.benchmark_group("moment_growth_grid");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| verify_moment_growth(black_box(&h), &grid, exec).unwrap())
        });
    }
    group.finish();
}

fn uniform_scan(c: &mut Criterion) {
    let h = QuadraticHamiltonian::squeezing();
    let grid = UniformGrid { ms: (6..=9).map(|k| 1 << k).collect(), ..Default::default() };
    let mut group = c.benchmark_group("uniform_scan");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| verify_uniform_operator_bound(black_box(&h), &grid, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dynamic_sweep, moment_growth_grid, uniform_scan);
criterion_main!(benches);
