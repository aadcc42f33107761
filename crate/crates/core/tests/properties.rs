//! Property tests of the catalog ordering and the averaging identity.

mod common;

use common::{brute_force_indices, close, random_samples, tensor_cosine};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wrv_core::basis::{multi_index_sequence, BasisCatalog};
use wrv_core::estimators::{OnlineEstimator, ParametricSgd, ScheduleSieve, SieveSgd};
use wrv_core::LossKind;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn catalog_matches_brute_force(p in 1usize..=3, count in 1usize..=200) {
        let got: Vec<Vec<u32>> = multi_index_sequence(p, count)
            .unwrap()
            .into_iter()
            .map(|l| l.entries().to_vec())
            .collect();
        prop_assert_eq!(got, brute_force_indices(p, count));
    }

    #[test]
    fn basis_vector_is_tensor_cosines(p in 1usize..=3, j in 1usize..=60, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_samples(&mut rng, p, 1).remove(0).x;
        let mut catalog = BasisCatalog::new(p).unwrap();
        let v = catalog.basis_vector(j, &x).unwrap();
        for (value, l) in v.iter().zip(brute_force_indices(p, j)) {
            prop_assert!(close(*value, tensor_cosine(&l, &x), 1e-12));
        }
    }

    #[test]
    fn averaged_iterate_is_mean_of_snapshots(n in 1usize..=200, seed in any::<u64>(), sieve in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_samples(&mut rng, 2, n);
        let mut snapshots: Vec<Vec<f64>> = Vec::new();
        let averaged = if sieve {
            let schedule = ScheduleSieve::rate_optimal(0.3, 1.5, 1.0, 0.7).unwrap();
            let mut e = SieveSgd::new(2, schedule, LossKind::Squared).unwrap();
            for s in &data {
                e.update(s).unwrap();
                snapshots.push(e.trajectory().to_vec());
            }
            e.averaged().to_vec()
        } else {
            let mut e = ParametricSgd::new(2, 0.2, LossKind::Squared).unwrap();
            for s in &data {
                e.update(s).unwrap();
                snapshots.push(e.trajectory().to_vec());
            }
            e.averaged().to_vec()
        };
        for (k, a) in averaged.iter().enumerate() {
            let mean = snapshots.iter().map(|b| b.get(k).copied().unwrap_or(0.0)).sum::<f64>() / n as f64;
            prop_assert!(close(*a, mean, 1e-10), "coordinate {}: {} vs {}", k, a, mean);
        }
    }
}
