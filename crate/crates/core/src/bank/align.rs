use nalgebra::{Matrix3, Rotation3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::{PointCloud, Vec3};

/// Centers the cloud and rotates its principal axes onto x, y, z in order of
/// decreasing variance.
///
/// The x and y signs are chosen so the third central moment along each is
/// non-negative; z is x × y so the result is a proper rotation. Returns the
/// aligned cloud and the rotation R with `aligned = R (p − centroid)`.
pub fn pca_align(cloud: &PointCloud) -> Result<(PointCloud, Rotation3<f64>)> {
    let pts = cloud.positions();
    if pts.len() < 4 {
        return Err(Error::DegenerateGeometry(format!(
            "axis alignment needs at least 4 points, got {}",
            pts.len()
        )));
    }
    let centroid = cloud.centroid().expect("non-empty");
    let mut cov = Matrix3::zeros();
    for p in pts {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    cov /= pts.len() as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let (l_max, l_min) = (eig.eigenvalues[order[0]], eig.eigenvalues[order[2]]);
    if !(l_max > 0.0) || l_min <= 1e-12 * l_max {
        return Err(Error::DegenerateGeometry(
            "points are collinear or coplanar".into(),
        ));
    }
    let axis = |i: usize| -> Vec3 {
        let a: Vec3 = eig.eigenvectors.column(order[i]).into();
        let skew: f64 = pts.iter().map(|p| (p - centroid).dot(&a).powi(3)).sum();
        if skew < 0.0 {
            -a
        } else {
            a
        }
    };
    let x = axis(0);
    let y = axis(1);
    let z = x.cross(&y);
    let rot = Rotation3::from_matrix_unchecked(Matrix3::from_rows(&[
        x.transpose(),
        y.transpose(),
        z.transpose(),
    ]));
    Ok((cloud.map_positions(|p| rot * (p - centroid)), rot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp, Normal};

    fn anisotropic(seed: u64, sd: [f64; 3]) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = Normal::new(0.0, 1.0).unwrap();
        // an exponential term keeps every axis skewed
        let e = Exp::new(1.0).unwrap();
        let pts = (0..2000)
            .map(|_| {
                Vec3::new(
                    sd[0] * (n.sample(&mut rng) + e.sample(&mut rng)),
                    sd[1] * (n.sample(&mut rng) + e.sample(&mut rng)),
                    sd[2] * (n.sample(&mut rng) + e.sample(&mut rng)),
                )
            })
            .collect();
        PointCloud::new(pts)
    }

    fn covariance(c: &PointCloud) -> Matrix3<f64> {
        let m = c.centroid().unwrap();
        let mut cov = Matrix3::zeros();
        for p in c.positions() {
            cov += (p - m) * (p - m).transpose();
        }
        cov / c.len() as f64
    }

    #[test]
    fn elongation_moves_to_x() {
        let cloud = anisotropic(1, [2.0, 3.0, 1.0]);
        let (aligned, rot) = pca_align(&cloud).unwrap();
        assert!((rot.matrix().determinant() - 1.0).abs() < 1e-12);
        let cov = covariance(&aligned);
        assert!(cov[(0, 0)] > cov[(1, 1)] && cov[(1, 1)] > cov[(2, 2)]);
        let scale = cov[(0, 0)];
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!(cov[(i, j)].abs() < 1e-6 * scale);
        }
        // original y axis maps onto ±x
        assert!((rot * Vec3::y()).x.abs() > 0.99);
        assert!(aligned.centroid().unwrap().norm() < 1e-9);
    }

    #[test]
    fn idempotent() {
        let (once, _) = pca_align(&anisotropic(2, [3.0, 2.0, 1.0])).unwrap();
        let (twice, rot) = pca_align(&once).unwrap();
        assert!((rot.matrix() - Matrix3::identity()).abs().max() < 1e-6);
        for (a, b) in once.positions().iter().zip(twice.positions()) {
            assert!((a - b).norm() < 1e-6);
        }
    }

    #[test]
    fn degenerate_inputs() {
        let line = PointCloud::new((0..3).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect());
        assert!(matches!(
            pca_align(&line),
            Err(Error::DegenerateGeometry(_))
        ));
        let flat = PointCloud::new(
            (0..10)
                .map(|i| Vec3::new(i as f64, (i * i) as f64, 0.0))
                .collect(),
        );
        assert!(matches!(
            pca_align(&flat),
            Err(Error::DegenerateGeometry(_))
        ));
    }
}
