//! Fixtures shared by the criterion benchmarks.

use plgnet_core::sampling::{derive_seed, generate_graph, gibbs_sample, GibbsConfig, GraphSpec};
use plgnet_core::{SampleMatrix, ThetaMatrix};

/// Random network plus `n` Gibbs draws from it. `diag` pins one node
/// potential (0-based vertex).
pub fn scenario(p: usize, edge_prob: f64, n: usize, seed: u64, diag: Option<(usize, f64)>) -> (ThetaMatrix, SampleMatrix) {
    let mut spec = GraphSpec::new(p, edge_prob, derive_seed(seed, 0));
    if let Some((s, v)) = diag {
        spec = spec.with_diagonal(s, v);
    }
    let theta = generate_graph(&spec).expect("valid graph spec");
    let cfg = GibbsConfig {
        n_samples: n,
        burn_in: 1000,
        thinning: 1,
        seed: derive_seed(seed, 1),
    };
    let x = gibbs_sample(&theta, &cfg).expect("valid sampler config");
    (theta, x)
}
