use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use plgnet_bench::scenario;
use plgnet_core::estimators::fit_plg_lenient;
use plgnet_core::{build_stacked, fit_direct_pl, fit_nlr, DirectConfig, SolverConfig, Symmetrize};

fn stacked_design(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_stacked");
    for p in [10, 30] {
        let (_, x) = scenario(p, 0.3, 1000, 1, None);
        group.bench_with_input(BenchmarkId::from_parameter(p), &x, |b, x| b.iter(|| build_stacked(black_box(x))));
    }
    group.finish();
}

fn single_lambda(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("single_lambda");
    for p in [5, 10, 15] {
        let (_, x) = scenario(p, 0.3, 1000, 2, None);
        let lambda = [0.0144];
        group.bench_with_input(BenchmarkId::new("plg", p), &x, |b, x| {
            b.iter(|| fit_plg_lenient(black_box(x), &lambda, &cfg))
        });
        group.bench_with_input(BenchmarkId::new("nlr", p), &x, |b, x| {
            b.iter(|| fit_nlr(black_box(x), &[lambda[0] / 2.0], &cfg, Symmetrize::Mean))
        });
        if p <= 10 {
            group.bench_with_input(BenchmarkId::new("direct", p), &x, |b, x| {
                b.iter(|| fit_direct_pl(black_box(x), &lambda, &DirectConfig::default()))
            });
        }
    }
    group.finish();
}

/// Cold fits across the penalty range with one dominant node potential.
fn unbalanced(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let (_, x) = scenario(10, 0.3, 1000, 3, Some((0, 5.0)));
    let mut group = c.benchmark_group("unbalanced");
    for lambda in [0.1, 0.01, 0.001] {
        group.bench_with_input(BenchmarkId::new("plg", lambda), &lambda, |b, &l| {
            b.iter(|| fit_plg_lenient(black_box(&x), &[l], &cfg))
        });
        group.bench_with_input(BenchmarkId::new("nlr", lambda), &lambda, |b, &l| {
            b.iter(|| fit_nlr(black_box(&x), &[l / 2.0], &cfg, Symmetrize::Mean))
        });
    }
    group.finish();
}

criterion_group!(benches, stacked_design, single_lambda, unbalanced);
criterion_main!(benches);
