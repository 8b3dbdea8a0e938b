//! Sequential vs parallel execution of the data-parallel sweeps.
//!
//! Both modes produce identical results; only the wall time differs. Built
//! without the `parallel` feature the two rows measure the same code.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bdfdoc_core::doc::{compute_doc_kernels, verify_orthogonality};
use bdfdoc_core::experiment::{convergence_study, ConvergenceSettings};
use bdfdoc_core::generate_bdf_kernels;
use bdfdoc_core::par::Execution;
use bdfdoc_core::spectral::{certify_spectral, quadratic_form_check, SpectralSettings, DEFAULT_SEED};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn quadratic_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("quadratic_form_check");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "k5_n50_1e4"), &exec, |bench, &exec| {
            bench.iter(|| quadratic_form_check(5, 50, 10_000, DEFAULT_SEED, exec).unwrap())
        });
    }
    group.finish();
}

fn spectral_sweep(c: &mut Criterion) {
    let settings = SpectralSettings::default();
    let mut group = c.benchmark_group("certify_spectral");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "k5"), &exec, |bench, &exec| {
            bench.iter(|| certify_spectral(5, &settings, exec).unwrap())
        });
    }
    group.finish();
}

fn orthogonality(c: &mut Criterion) {
    let b = generate_bdf_kernels(4).unwrap();
    let theta = compute_doc_kernels(&b, 197).unwrap();
    let mut group = c.benchmark_group("verify_orthogonality");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "k4_n200"), &exec, |bench, &exec| {
            bench.iter(|| verify_orthogonality(&b, &theta, 200, exec).unwrap())
        });
    }
    group.finish();
}

fn convergence(c: &mut Criterion) {
    let settings = ConvergenceSettings::pde(3, 256);
    let mut group = c.benchmark_group("convergence_study");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "pde_k3_m256"), &exec, |bench, &exec| {
            bench.iter(|| convergence_study(&settings, exec).unwrap())
        });
    }
    group.finish();
}

fn criterion_config() -> Criterion {
    Criterion::default().measurement_time(Duration::from_secs(5)).sample_size(10)
}

criterion_group! {
    name = sweeps;
    config = criterion_config();
    targets = quadratic_forms, spectral_sweep, orthogonality, convergence
}

criterion_main!(sweeps);
