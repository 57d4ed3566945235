use pgt_core::intensity::{group_intensity_distance, hungarian_match};
use pgt_core::{PointCloud, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum over all permutations, each cost summed in row order.
fn brute_force_cost(a: &[Vec3], b: &[Vec3]) -> f64 {
    fn rec(a: &[Vec3], b: &[Vec3], used: &mut Vec<bool>, row: usize, acc: f64, best: &mut f64) {
        if row == a.len() {
            *best = best.min(acc);
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                rec(a, b, used, row + 1, acc + (a[row] - b[j]).abs().sum(), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(a, b, &mut vec![false; b.len()], 0, 0.0, &mut best);
    best
}

fn random_centers(rng: &mut ChaCha8Rng, n: usize, lattice: bool) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            if lattice {
                Vec3::new(
                    rng.random_range(0..4) as f64,
                    rng.random_range(0..4) as f64,
                    rng.random_range(0..2) as f64,
                )
            } else {
                Vec3::new(
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-2.0..2.0),
                )
            }
        })
        .collect()
}

#[test]
fn assignment_cost_equals_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..1000 {
        let n = 1 + trial % 8;
        // integer-valued centers create many tied optima
        let lattice = trial % 3 == 0;
        let a = random_centers(&mut rng, n, lattice);
        let b = random_centers(&mut rng, n, lattice);
        let m = hungarian_match(&a, &b).unwrap();
        let brute = brute_force_cost(&a, &b);
        let mut seen = m.permutation.clone();
        seen.sort();
        assert_eq!(seen, (0..n).collect::<Vec<_>>());
        assert!(
            (m.total_cost - brute).abs() <= 1e-12 * brute.max(1.0),
            "trial {trial}: {} vs {brute}",
            m.total_cost
        );
    }
}

fn cloud(seed: u64, n: usize) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n)
        .map(|_| {
            Vec3::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(0.0..1.5),
            )
        })
        .collect();
    let int = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    PointCloud::new(pts).with_intensity(int).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_is_symmetric(s1 in 0u64..1000, s2 in 1000u64..2000, n in 16usize..80) {
        let (a, b) = (cloud(s1, n), cloud(s2, n));
        let ab = group_intensity_distance(&a, &b, 8, 0.1).unwrap().value;
        let ba = group_intensity_distance(&b, &a, 8, 0.1).unwrap().value;
        prop_assert!((ab - ba).abs() <= 1e-12, "{ab} vs {ba}");
        prop_assert!(ab >= 0.0);
    }

    #[test]
    fn self_distance_is_zero(s in 0u64..1000, n in 16usize..80) {
        let a = cloud(s, n);
        prop_assert_eq!(group_intensity_distance(&a, &a, 16, 0.1).unwrap().value, 0.0);
    }

    #[test]
    fn linear_in_lambda(s1 in 0u64..1000, s2 in 1000u64..2000, lambda in 0.0f64..5.0) {
        let (a, b) = (cloud(s1, 64), cloud(s2, 64));
        let base = group_intensity_distance(&a, &b, 16, 1.0).unwrap().value;
        let scaled = group_intensity_distance(&a, &b, 16, lambda).unwrap().value;
        prop_assert!((scaled - lambda * base).abs() <= 1e-12 * base.max(1.0) * lambda.max(1.0));
    }
}
