use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use plgnet_bench::scenario;
use plgnet_core::sampling::{gibbs_sample, GibbsConfig};

fn gibbs(c: &mut Criterion) {
    let mut group = c.benchmark_group("gibbs_1000");
    for p in [10, 50] {
        let (theta, _) = scenario(p, 0.3, 10, 4, None);
        let cfg = GibbsConfig {
            n_samples: 1000,
            burn_in: 1000,
            thinning: 1,
            seed: 9,
        };
        group.bench_with_input(BenchmarkId::from_parameter(p), &theta, |b, theta| {
            b.iter(|| gibbs_sample(black_box(theta), &cfg))
        });
    }
    group.finish();
}

criterion_group!(benches, gibbs);
criterion_main!(benches);
