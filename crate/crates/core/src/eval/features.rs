use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::{Box3D, PointCloud, Vec3};

pub const FEATURE_DIM: usize = 16;

pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "log_points",
    "dx",
    "dy",
    "dz",
    "z_q10",
    "z_q50",
    "z_q90",
    "radial_mean",
    "radial_std",
    "intensity_mean",
    "intensity_std",
    "intensity_q50",
    "pca_ratio_21",
    "pca_ratio_31",
    "height_width",
    "occupancy",
];

pub type FeatureVector = [f64; FEATURE_DIM];

/// Linear-interpolation quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Descriptor of an object given its points and box in a common frame.
/// Everything is computed in the box frame, so moving or turning the pair
/// about z leaves it unchanged. Intensity terms are 0 without intensity.
pub fn featurize(points: &PointCloud, bbox: &Box3D) -> Result<FeatureVector> {
    let n = points.len();
    if n < 4 {
        return Err(Error::validation(format!(
            "featurize needs at least 4 points, got {n}"
        )));
    }
    let local: Vec<Vec3> = points
        .positions()
        .iter()
        .map(|p| bbox.to_local(p))
        .collect();
    let size = bbox.size;
    let mut f = [0.0; FEATURE_DIM];
    f[0] = (n as f64).ln();
    f[1] = size.x;
    f[2] = size.y;
    f[3] = size.z;

    let mut z: Vec<f64> = local.iter().map(|p| p.z + size.z / 2.0).collect();
    z.sort_by(f64::total_cmp);
    f[4] = quantile(&z, 0.1);
    f[5] = quantile(&z, 0.5);
    f[6] = quantile(&z, 0.9);

    let radial: Vec<f64> = local.iter().map(|p| p.norm()).collect();
    (f[7], f[8]) = mean_std(&radial);

    if let Some(int) = points.intensity() {
        (f[9], f[10]) = mean_std(int);
        let mut s = int.to_vec();
        s.sort_by(f64::total_cmp);
        f[11] = quantile(&s, 0.5);
    }

    let centroid = local.iter().fold(Vec3::zeros(), |a, p| a + p) / n as f64;
    let mut cov = Matrix3::zeros();
    for p in &local {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(cov / n as f64)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0))
        .collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    if eig[0] > 0.0 {
        f[12] = (eig[1] / eig[0]).clamp(0.0, 1.0);
        f[13] = (eig[2] / eig[0]).clamp(0.0, 1.0);
    }
    f[14] = size.z / size.y;

    let mut occupied = [false; 64];
    for p in &local {
        let mut idx = [0usize; 3];
        let mut inside = true;
        for a in 0..3 {
            let t = (p[a] / size[a] + 0.5) * 4.0;
            if !(0.0..=4.0).contains(&t) {
                inside = false;
            }
            idx[a] = (t.floor().max(0.0) as usize).min(3);
        }
        if inside {
            occupied[idx[0] + 4 * (idx[1] + 4 * idx[2])] = true;
        }
    }
    f[15] = occupied.iter().filter(|o| **o).count() as f64 / 64.0;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ClassLabel;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn filled_cube(n: usize, seed: u64) -> (PointCloud, Box3D) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n)
            .map(|_| {
                Vec3::new(
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                )
            })
            .collect();
        let int = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        (
            PointCloud::new(pts).with_intensity(int).unwrap(),
            Box3D::new(Vec3::zeros(), Vec3::repeat(1.0), 0.0, ClassLabel::Car).unwrap(),
        )
    }

    #[test]
    fn filled_cube_occupancy() {
        let (c, b) = filled_cube(10_000, 1);
        let f = featurize(&c, &b).unwrap();
        assert!(f[15] >= 0.95);
        assert!((f[5] - 0.5).abs() < 0.05);
        assert!(f[12] > 0.8 && f[12] <= 1.0);
    }

    #[test]
    fn constant_intensity() {
        let (c, b) = filled_cube(50, 2);
        let mut c2 = c.clone();
        c2.set_intensity_unchecked(vec![0.5; 50]);
        let f = featurize(&c2, &b).unwrap();
        assert_eq!((f[9], f[10], f[11]), (0.5, 0.0, 0.5));
        assert!(featurize(&c.select(&[0, 1, 2]), &b).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn invariant_under_planar_motion(seed in 0u64..1000, yaw in -3.0f64..3.0, tx in -50.0f64..50.0, ty in -50.0f64..50.0, tz in -3.0f64..3.0) {
            let (c, b) = filled_cube(300, seed);
            let f0 = featurize(&c, &b).unwrap();
            let moved = Box3D::new(Vec3::new(tx, ty, tz), b.size, yaw, b.class_label).unwrap();
            let pts = c.map_positions(|p| moved.to_parent(p));
            let f1 = featurize(&pts, &moved).unwrap();
            for (a, b) in f0.iter().zip(&f1) {
                prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
            }
        }
    }
}
