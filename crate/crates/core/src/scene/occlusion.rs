use crate::lidarize::{cell_of, project_to_range, CellLookup};
use crate::model::{PointCloud, SensorConfig};

/// Depth band kept behind the nearest return of a range cell (meters).
pub const DEFAULT_OCCLUSION_EPS: f64 = 0.3;

/// True for points within `eps` of their range cell's nearest depth. Points
/// that do not land in the range image are kept.
pub fn occlusion_keep_mask(points: &PointCloud, sensor: &SensorConfig, eps: f64) -> Vec<bool> {
    let image = project_to_range(points, sensor);
    points
        .positions()
        .iter()
        .map(|p| match cell_of(p, sensor) {
            CellLookup::Cell { u, v, range } => {
                image.get(u, v).is_none_or(|cell| range <= cell.depth + eps)
            }
            _ => true,
        })
        .collect()
}

/// Drops points hidden behind nearer geometry in the same range cell.
pub fn occlusion_filter(points: &PointCloud, sensor: &SensorConfig, eps: f64) -> PointCloud {
    let keep = occlusion_keep_mask(points, sensor, eps);
    points.filter(|i, _| keep[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vec3;

    #[test]
    fn wall_hides_object() {
        let cfg = SensorConfig::nuscenes();
        let mut pts = Vec::new();
        // dense wall at x = 5 spanning the object's angular extent
        for iy in -60..=60 {
            for iz in -40..=20 {
                pts.push(Vec3::new(5.0, iy as f64 * 0.01, iz as f64 * 0.01));
            }
        }
        let wall = pts.len();
        for iy in -5..=5 {
            for iz in -5..=5 {
                pts.push(Vec3::new(20.0, iy as f64 * 0.05, iz as f64 * 0.05));
            }
        }
        let cloud = PointCloud::new(pts);
        let keep = occlusion_keep_mask(&cloud, &cfg, DEFAULT_OCCLUSION_EPS);
        assert!(keep[wall..].iter().all(|k| !k));
        let kept = occlusion_filter(&cloud, &cfg, DEFAULT_OCCLUSION_EPS);
        assert!(kept.positions().iter().all(|p| p.x < 6.0));
    }
}
