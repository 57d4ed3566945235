use crate::error::{Error, Result};
use crate::model::{PointCloud, Vec3};

use super::fps::farthest_point_sample;

/// Partition of a cloud into ball patches around sampled centers.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPatchSet {
    pub centers: Vec<Vec3>,
    /// Index of each center in the source cloud.
    pub center_indices: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// Per-patch mean intensity, when the cloud carries intensities.
    pub mean_intensity: Option<Vec<f64>>,
    pub mean_rgb: Option<Vec<[f64; 3]>>,
}

impl BallPatchSet {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Centers from farthest point sampling; each point joins its nearest center
/// (ties to the lower center index). A patch left empty by duplicate centers
/// takes its center point's channel values as its means.
pub fn build_ball_patches(cloud: &PointCloud, n: usize) -> Result<BallPatchSet> {
    if n == 0 {
        return Err(Error::validation("patch count must be at least 1"));
    }
    if cloud.len() < n {
        return Err(Error::validation(format!(
            "cloud has {} points, fewer than {n} patches",
            cloud.len()
        )));
    }
    let pts = cloud.positions();
    let center_indices = farthest_point_sample(pts, n)?;
    let centers: Vec<Vec3> = center_indices.iter().map(|&i| pts[i]).collect();
    let mut members = vec![Vec::new(); n];
    for (i, p) in pts.iter().enumerate() {
        let mut best = (0, f64::INFINITY);
        for (c, q) in centers.iter().enumerate() {
            let d = (p - q).norm_squared();
            if d < best.1 {
                best = (c, d);
            }
        }
        members[best.0].push(i);
    }
    let mean_intensity = cloud.intensity().map(|int| {
        members
            .iter()
            .zip(&center_indices)
            .map(|(m, &ci)| {
                if m.is_empty() {
                    int[ci]
                } else {
                    m.iter().map(|&i| int[i]).sum::<f64>() / m.len() as f64
                }
            })
            .collect()
    });
    let mean_rgb = cloud.rgb().map(|rgb| {
        members
            .iter()
            .zip(&center_indices)
            .map(|(m, &ci)| {
                if m.is_empty() {
                    rgb[ci]
                } else {
                    let mut s = [0.0; 3];
                    for &i in m {
                        for c in 0..3 {
                            s[c] += rgb[i][c];
                        }
                    }
                    s.map(|v| v / m.len() as f64)
                }
            })
            .collect()
    });
    Ok(BallPatchSet {
        centers,
        center_indices,
        members,
        mean_intensity,
        mean_rgb,
    })
}
