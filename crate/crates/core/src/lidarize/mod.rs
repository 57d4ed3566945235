//! Conversion of dense object points into sparse, sensor-faithful returns.
//!
//! Points are binned into an H×W range image (rows by inclination, columns by
//! azimuth). Each cell keeps only its nearest point, which discards the far
//! side of the object. Survivors are then snapped to the center angles of
//! their cell so that they lie on the sensor's regular scan lattice.

mod range_image;

use std::f64::consts::PI;

pub use range_image::{cell_of, project_to_range, CellLookup, RangeCell, RangeImage};

use nalgebra::{Rotation3, Vector3};

use crate::error::{Error, Result};
use crate::model::{spherical_to_cart, Box3D, PointCloud, SensorConfig, Spherical, Vec3};

/// Inclination of lattice row `v`: `[1 − (v + 0.5)/H]·FOV_total − FOV_down` (radians).
pub fn lattice_inclination(v: usize, config: &SensorConfig) -> f64 {
    let h = config.channels as f64;
    (1.0 - (v as f64 + 0.5) / h) * config.fov_total_rad() - config.fov_down_rad()
}

/// Azimuth of lattice column `u`: `π[2(u + 0.5)/W − 1]`.
pub fn lattice_azimuth(u: usize, config: &SensorConfig) -> f64 {
    let w = config.azimuth_resolution as f64;
    PI * (2.0 * (u as f64 + 0.5) / w - 1.0)
}

/// One point per occupied cell, at the cell's depth and lattice angles.
///
/// Colors, intensities and time offsets are copied from the surviving source
/// point; the ring channel is set to the row index.
pub fn rearrange(image: &RangeImage, source: &PointCloud) -> PointCloud {
    let cfg = image.config();
    let mut positions = Vec::with_capacity(image.occupied_count());
    let mut sources = Vec::with_capacity(image.occupied_count());
    let mut rings = Vec::with_capacity(image.occupied_count());
    for (v, u, cell) in image.occupied() {
        positions.push(spherical_to_cart(&Spherical {
            range: cell.depth,
            azimuth: lattice_azimuth(u, cfg),
            inclination: lattice_inclination(v, cfg),
        }));
        sources.push(cell.source_index);
        rings.push(v as u32);
    }
    let carried = source.select(&sources);
    let mut out = PointCloud::new(positions);
    if let Some(rgb) = carried.rgb() {
        out = out.with_rgb(rgb.to_vec()).expect("lengths match");
    }
    if let Some(i) = carried.intensity() {
        out = out.with_intensity(i.to_vec()).expect("lengths match");
    }
    if let Some(t) = carried.time_offset() {
        out = out.with_time_offset(t.to_vec()).expect("lengths match");
    }
    out.with_ring(rings).expect("lengths match")
}

/// Places an object-frame cloud at `center`/`yaw` in the sensor frame, keeps
/// the visible lattice returns and brings them back to the object frame.
pub fn lidarize_object(
    dense: &PointCloud,
    center: &Vec3,
    yaw: f64,
    config: &SensorConfig,
) -> Result<PointCloud> {
    if center.norm() == 0.0 {
        return Err(Error::Domain(
            "object center coincides with the sensor origin".into(),
        ));
    }
    config.validate()?;
    let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), yaw);
    let placed = dense.map_positions(|p| rot * p + center);
    let image = project_to_range(&placed, config);
    let inv = rot.inverse();
    Ok(rearrange(&image, &placed).map_positions(|p| inv * (p - center)))
}

/// Anything with a reference position for range gating.
pub trait Ranged {
    /// Horizontal distance of the object center from the sensor.
    fn center_range(&self) -> f64;
}

impl Ranged for Box3D {
    fn center_range(&self) -> f64 {
        self.center.xy().norm()
    }
}

impl<T: Ranged> Ranged for &T {
    fn center_range(&self) -> f64 {
        (*self).center_range()
    }
}

/// Keeps items whose center range is ≤ `threshold`. Returns the survivors and
/// the number removed.
pub fn distance_filter<T: Ranged>(items: Vec<T>, threshold: f64) -> Result<(Vec<T>, usize)> {
    if !(threshold > 0.0) {
        return Err(Error::validation(format!(
            "distance threshold must be positive, got {threshold}"
        )));
    }
    let before = items.len();
    let kept: Vec<T> = items
        .into_iter()
        .filter(|it| it.center_range() <= threshold)
        .collect();
    let removed = before - kept.len();
    Ok((kept, removed))
}
