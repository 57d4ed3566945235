//! Domain types shared by every pipeline stage.
//!
//! Coordinates are right-handed with x forward, y left and z up. Yaw is
//! measured counterclockwise from +x about +z.

mod class;
mod cloud;
mod coords;

use std::f64::consts::PI;

use nalgebra::{Isometry3, Rotation3, Vector3};

pub use class::ClassLabel;
pub use cloud::PointCloud;
pub use coords::{cart_to_spherical, spherical_to_cart, Spherical};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Wraps an angle into (−π, π].
pub fn normalize_angle(angle: f64) -> f64 {
    let mut a = angle % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Geometry of a spinning LiDAR.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorConfig {
    pub channels: usize,
    pub azimuth_resolution: usize,
    /// Degrees above the horizon.
    pub fov_up: f64,
    /// Degrees below the horizon, stored positive.
    pub fov_down: f64,
    pub max_range: f64,
    /// Sensor mount position in the ego frame.
    pub sensor_origin: Vec3,
}

impl SensorConfig {
    pub fn new(
        channels: usize,
        azimuth_resolution: usize,
        fov_up: f64,
        fov_down: f64,
        max_range: f64,
        sensor_origin: Vec3,
    ) -> Result<Self> {
        let cfg = Self {
            channels,
            azimuth_resolution,
            fov_up,
            fov_down,
            max_range,
            sensor_origin,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// 32 channels, 1080 azimuth bins, −30°..+10°, mounted 1.84 m above ground.
    pub fn nuscenes() -> Self {
        Self {
            channels: 32,
            azimuth_resolution: 1080,
            fov_up: 10.0,
            fov_down: 30.0,
            max_range: 100.0,
            sensor_origin: Vec3::new(0.0, 0.0, 1.84),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels == 0 || self.azimuth_resolution == 0 {
            return Err(Error::validation(
                "sensor channels and azimuth resolution must be positive",
            ));
        }
        if !(self.fov_total() > 0.0) {
            return Err(Error::validation(format!(
                "sensor fov_up + fov_down must be positive, got {}",
                self.fov_total()
            )));
        }
        if !(self.max_range > 0.0) {
            return Err(Error::validation("sensor max_range must be positive"));
        }
        Ok(())
    }

    pub fn fov_total(&self) -> f64 {
        self.fov_up + self.fov_down
    }

    pub fn fov_up_rad(&self) -> f64 {
        self.fov_up.to_radians()
    }

    pub fn fov_down_rad(&self) -> f64 {
        self.fov_down.to_radians()
    }

    pub fn fov_total_rad(&self) -> f64 {
        self.fov_total().to_radians()
    }
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self::nuscenes()
    }
}

/// Oriented 3-D box with yaw about +z.
#[derive(Debug, Clone, PartialEq)]
pub struct Box3D {
    pub center: Vec3,
    /// (dx, dy, dz): length along heading, width, height.
    pub size: Vec3,
    pub yaw: f64,
    pub class_label: ClassLabel,
    pub score: Option<f64>,
}

impl Box3D {
    pub fn new(center: Vec3, size: Vec3, yaw: f64, class_label: ClassLabel) -> Result<Self> {
        if !(size.x > 0.0 && size.y > 0.0 && size.z > 0.0) {
            return Err(Error::validation(format!(
                "box size must be positive, got ({}, {}, {})",
                size.x, size.y, size.z
            )));
        }
        if !center.iter().chain(size.iter()).all(|v| v.is_finite()) || !yaw.is_finite() {
            return Err(Error::validation("box has non-finite fields"));
        }
        Ok(Self {
            center,
            size,
            yaw: normalize_angle(yaw),
            class_label,
            score: None,
        })
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }

    pub fn volume(&self) -> f64 {
        self.size.x * self.size.y * self.size.z
    }

    /// Box frame → parent frame.
    pub fn pose(&self) -> Isometry3<f64> {
        Isometry3::from_parts(
            self.center.into(),
            Rotation3::from_axis_angle(&Vector3::z_axis(), self.yaw).into(),
        )
    }

    /// Expresses `p` (parent frame) in the box frame.
    pub fn to_local(&self, p: &Vec3) -> Vec3 {
        let d = p - self.center;
        let (s, c) = self.yaw.sin_cos();
        Vec3::new(c * d.x + s * d.y, -s * d.x + c * d.y, d.z)
    }

    pub fn to_parent(&self, p: &Vec3) -> Vec3 {
        let (s, c) = self.yaw.sin_cos();
        Vec3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z) + self.center
    }

    /// Containment test against the box inflated by `margin` (relative, e.g. 0.01).
    pub fn contains(&self, p: &Vec3, margin: f64) -> bool {
        let l = self.to_local(p);
        let h = self.size * (0.5 * (1.0 + margin));
        l.x.abs() <= h.x && l.y.abs() <= h.y && l.z.abs() <= h.z
    }

    /// BEV footprint corners, counterclockwise.
    pub fn bev_corners(&self) -> [[f64; 2]; 4] {
        let (hx, hy) = (self.size.x / 2.0, self.size.y / 2.0);
        let (s, c) = self.yaw.sin_cos();
        let local = [[hx, hy], [-hx, hy], [-hx, -hy], [hx, -hy]];
        local.map(|[x, y]| [c * x - s * y + self.center.x, s * x + c * y + self.center.y])
    }
}

/// One LiDAR sweep with its annotations. Points are expressed in the ego frame.
#[derive(Debug, Clone, Default)]
pub struct LidarFrame {
    pub points: PointCloud,
    pub boxes: Vec<Box3D>,
    pub ego_pose: Option<Isometry3<f64>>,
}

impl LidarFrame {
    pub fn new(points: PointCloud, boxes: Vec<Box3D>) -> Self {
        Self {
            points,
            boxes,
            ego_pose: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn angle_normalization_range() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(normalize_angle(0.0), 0.0);
    }

    #[test]
    fn box_rejects_nonpositive_size() {
        let r = Box3D::new(
            Vec3::zeros(),
            Vec3::new(1.0, 0.0, 1.0),
            0.0,
            ClassLabel::Car,
        );
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn box_local_parent_roundtrip() {
        let b = Box3D::new(
            Vec3::new(3.0, -2.0, 0.5),
            Vec3::new(4.0, 2.0, 1.5),
            0.7,
            ClassLabel::Car,
        )
        .unwrap();
        let p = Vec3::new(1.0, 2.0, 3.0);
        assert!((b.to_parent(&b.to_local(&p)) - p).norm() < 1e-12);
        assert!(b.contains(&b.center, 0.0));
        assert!(!b.contains(&Vec3::new(10.0, 0.0, 0.0), 0.0));
    }

    #[test]
    fn sensor_validation() {
        assert!(SensorConfig::nuscenes().validate().is_ok());
        assert!(SensorConfig::new(32, 1080, -10.0, 10.0, 50.0, Vec3::zeros()).is_err());
        assert!(SensorConfig::new(0, 1080, 10.0, 30.0, 50.0, Vec3::zeros()).is_err());
    }

    proptest! {
        #[test]
        fn yaw_normalization_idempotent(a in -100.0f64..100.0) {
            let n = normalize_angle(a);
            prop_assert!(n > -PI && n <= PI);
            prop_assert_eq!(normalize_angle(n), n);
        }
    }
}
