mod support;

use plgnet_core::model::{pseudo_likelihood, pseudo_likelihood_gradient};
use plgnet_core::transform::{converted_objective, pair_index, pairs_in_order, vectorize, n_pairs};
use plgnet_core::{build_stacked, SampleMatrix, ThetaMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::*;

fn instance() -> impl Strategy<Value = (ThetaMatrix, SampleMatrix, f64)> {
    (2usize..=8, 1usize..=50, any::<u64>(), 0.0f64..0.5).prop_map(|(p, n, seed, lambda)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (random_theta(p, 2.0, &mut rng), random_samples(n, p, &mut rng), lambda)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn converted_objective_equals_pseudo_likelihood((theta, x, lambda) in instance()) {
        let sp = build_stacked(&x).unwrap();
        let conv = converted_objective(&sp, &vectorize(&theta), lambda, x.n()).unwrap();
        let direct = pseudo_likelihood(&theta, &x, lambda).unwrap();
        let reference = pseudo_likelihood_ref(&theta, &x, lambda);
        let scale = reference.abs().max(1.0);
        prop_assert!((conv.total - direct.total).abs() <= 1e-12 * scale);
        prop_assert!((direct.total - reference).abs() <= 1e-12 * scale);
    }

    #[test]
    fn gradient_matches_central_differences((theta, x, _l) in instance()) {
        let g = pseudo_likelihood_gradient(&theta, &x).unwrap();
        let fd = finite_difference_gradient(&theta, &x, 1e-5);
        let norm = fd.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for s in 0..theta.p() {
            for t in s..theta.p() {
                prop_assert!((g.get(s, t) - fd.get(s, t)).abs() <= 1e-6 * norm);
            }
        }
    }

    #[test]
    fn stacked_products_match_definition((theta, x, _l) in instance()) {
        use plgnet_core::solver::Design;
        let sp = build_stacked(&x).unwrap();
        let reference = stacked_reference(&x);
        let beta = vectorize(&theta);
        let mut eta = vec![0.0; sp.n_obs()];
        sp.design.matvec(beta.as_slice(), &mut eta);
        let expected = &reference.x * nalgebra::DVector::from_column_slice(beta.as_slice());
        for (a, b) in eta.iter().zip(expected.iter()) {
            prop_assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
        prop_assert_eq!(sp.response.as_slice(), reference.y.as_slice());
    }
}

#[test]
fn pair_index_is_a_bijection_onto_the_pair_block() {
    for p in 2..=30 {
        let pairs = pairs_in_order(p);
        assert_eq!(pairs.len(), n_pairs(p));
        for (j, &(s, t)) in pairs.iter().enumerate() {
            assert_eq!(pair_index(s, t, p).unwrap(), j);
            assert_eq!(pair_index(t, s, p).unwrap(), j);
        }
    }
}

#[test]
fn relabelling_vertices_permutes_the_objective_consistently() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let theta = random_theta(6, 1.0, &mut rng);
    let x = random_samples(40, 6, &mut rng);
    let perm = [3, 0, 5, 1, 4, 2];
    let a = pseudo_likelihood(&theta, &x, 0.1).unwrap().total;
    let b = pseudo_likelihood(&theta.permuted(&perm), &x.permuted_columns(&perm), 0.1)
        .unwrap()
        .total;
    assert!((a - b).abs() < 1e-10 * a.abs());
}
