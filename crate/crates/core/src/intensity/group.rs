use crate::error::{Error, Result};
use crate::model::PointCloud;

use super::hungarian::{hungarian_match, Assignment};
use super::patches::build_ball_patches;

/// Regularizing weight of the group intensity distance.
pub const DEFAULT_LAMBDA: f64 = 0.1;
/// Patches per object on 256-point resampled clouds.
pub const DEFAULT_PATCHES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupDistance {
    pub value: f64,
    pub assignment: Assignment,
    /// |mean_fake[j] − mean_real[σ(j)]| per fake patch j, before λ.
    pub terms: Vec<f64>,
}

/// λ · Σⱼ |E_{x∈b_j}(x) − E_{y∈b_σ̂(j)}(y)| with σ̂ the minimum-L1 matching of
/// the two clouds' patch centers.
pub fn group_intensity_distance(
    fake: &PointCloud,
    real: &PointCloud,
    patches: usize,
    lambda: f64,
) -> Result<GroupDistance> {
    if !(lambda >= 0.0) {
        return Err(Error::validation("lambda must be non-negative"));
    }
    if fake.intensity().is_none() || real.intensity().is_none() {
        return Err(Error::validation(
            "group intensity distance needs intensity on both clouds",
        ));
    }
    let a = build_ball_patches(fake, patches)?;
    let b = build_ball_patches(real, patches)?;
    let assignment = hungarian_match(&a.centers, &b.centers)?;
    let ma = a.mean_intensity.expect("intensity present");
    let mb = b.mean_intensity.expect("intensity present");
    let terms: Vec<f64> = assignment
        .permutation
        .iter()
        .enumerate()
        .map(|(j, &k)| (ma[j] - mb[k]).abs())
        .collect();
    let value = lambda * terms.iter().sum::<f64>();
    Ok(GroupDistance {
        value,
        assignment,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vec3;

    fn two_cluster_cloud(near: f64, far: f64) -> PointCloud {
        let mut pts = Vec::new();
        let mut int = Vec::new();
        for i in 0..8 {
            let t = i as f64 * 0.01;
            pts.push(Vec3::new(t, 0.0, 0.0));
            int.push(near);
            pts.push(Vec3::new(10.0 + t, 0.0, 0.0));
            int.push(far);
        }
        PointCloud::new(pts).with_intensity(int).unwrap()
    }

    #[test]
    fn constructed_pair() {
        let fake = two_cluster_cloud(0.5, 0.2);
        let real = two_cluster_cloud(0.3, 0.2);
        let d = group_intensity_distance(&fake, &real, 2, 0.1).unwrap();
        assert!((d.value - 0.02).abs() < 1e-12, "{}", d.value);
        assert_eq!(
            group_intensity_distance(&fake, &fake, 2, 0.1)
                .unwrap()
                .value,
            0.0
        );
        let d2 = group_intensity_distance(&fake, &real, 2, 0.2).unwrap();
        assert!((d2.value - 2.0 * d.value).abs() < 1e-12);
    }

    #[test]
    fn missing_intensity() {
        let fake = two_cluster_cloud(0.5, 0.2);
        let bare = PointCloud::new(fake.positions().to_vec());
        assert!(matches!(
            group_intensity_distance(&bare, &fake, 2, 0.1),
            Err(Error::Validation(_))
        ));
    }
}
