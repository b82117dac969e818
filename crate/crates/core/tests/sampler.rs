mod support;

use plgnet_core::model::joint_pmf;
use plgnet_core::sampling::{gibbs_sample, GibbsConfig};
use plgnet_core::ThetaMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::*;

fn chi_square(observed: &[f64], expected: &[f64], n: f64) -> f64 {
    observed
        .iter()
        .zip(expected)
        .map(|(o, e)| {
            let (o, e) = (o * n, e * n);
            (o - e) * (o - e) / e
        })
        .sum()
}

#[test]
fn gibbs_matches_enumerated_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for (i, p) in [2usize, 3, 4].into_iter().enumerate() {
        let theta = random_theta(p, 1.0, &mut rng);
        let exact = enumerate_pmf(&theta);
        for (code, &q) in exact.iter().enumerate() {
            let x: Vec<u8> = (0..p).map(|b| (code >> b & 1) as u8).collect();
            assert!((joint_pmf(&theta, &x).unwrap() - q).abs() < 1e-12);
        }
        let x = gibbs_sample(
            &theta,
            &GibbsConfig { n_samples: 100_000, burn_in: 1000, thinning: 10, seed: 900 + i as u64 },
        )
        .unwrap();
        let empirical = empirical_pmf(&x);
        let tv = total_variation(&empirical, &exact);
        assert!(tv < 0.02, "p = {p}: TV {tv}");
        // 0.001 critical values for 3, 7, 15 degrees of freedom.
        let critical = [16.27, 24.32, 37.70][i];
        let stat = chi_square(&empirical, &exact, 100_000.0);
        assert!(stat < critical, "p = {p}: chi-square {stat}");
    }
}

#[test]
fn pmf_normalizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in 1..=8 {
        let theta = random_theta(p, 2.0, &mut rng);
        let total: f64 = (0..1u32 << p)
            .map(|code| {
                let x: Vec<u8> = (0..p).map(|b| (code >> b & 1) as u8).collect();
                joint_pmf(&theta, &x).unwrap()
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
    assert_eq!(joint_pmf(&ThetaMatrix::zeros(2), &[1, 1]).unwrap(), 0.25);
}
