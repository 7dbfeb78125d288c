//! Parallel kernels on a one-thread pool versus the default pool.
//!
//! Build with `--no-default-features` to time the sequential code path
//! itself; then both pools run identical single-threaded code.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::{ThreadPool, ThreadPoolBuilder};

use gkrein_core::compound::compound_matrix;
use gkrein_core::compound::SizeCap;
use gkrein_core::gk::{verify_batch, Theorem};
use gkrein_core::kernel::{discretize, exterior_grid_radius, KernelSpec, QuadratureRule};
use gkrein_core::positivity::{is_totally_nonnegative, random_general, random_tn};

fn pools() -> Vec<(&'static str, ThreadPool)> {
    vec![
        (
            "sequential",
            ThreadPoolBuilder::new().num_threads(1).build().unwrap(),
        ),
        ("parallel", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn compound(c: &mut Criterion) {
    let m = random_general(16, 1).unwrap();
    let mut g = c.benchmark_group("compound_matrix_16_order3");
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| compound_matrix(black_box(&m), 3).unwrap()))
        });
    }
    g.finish();
}

fn tn_check(c: &mut Criterion) {
    let m = random_tn(14, 2, 40).unwrap();
    let mut g = c.benchmark_group("tn_check_14_order5");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| is_totally_nonnegative(black_box(&m), 5, 1e-9).unwrap()))
        });
    }
    g.finish();
}

fn exterior_radius(c: &mut Criterion) {
    let spec = KernelSpec::builtin("green_string", None).unwrap();
    let grid = discretize(&spec, 200, QuadratureRule::Midpoint).unwrap();
    let mut g = c.benchmark_group("exterior_radius_green_200");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| exterior_grid_radius(black_box(&grid)).unwrap()))
        });
    }
    g.finish();
}

fn batch(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_batch_exterior_n8_x100");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                pool.install(|| {
                    verify_batch(
                        Theorem::Exterior,
                        8,
                        100,
                        black_box(7),
                        1e-8,
                        SizeCap::default(),
                    )
                    .unwrap()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, compound, tn_check, exterior_radius, batch);
criterion_main!(benches);
