use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::Vec3;

/// Range, azimuth θ ∈ (−π, π] and inclination φ ∈ [−π/2, π/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spherical {
    pub range: f64,
    pub azimuth: f64,
    pub inclination: f64,
}

pub fn cart_to_spherical(p: &Vec3) -> Result<Spherical> {
    let range = p.norm();
    if !(range > 0.0) {
        return Err(Error::Domain(format!(
            "cannot take spherical coordinates of ({}, {}, {})",
            p.x, p.y, p.z
        )));
    }
    let mut azimuth = p.y.atan2(p.x);
    if azimuth == -PI {
        azimuth = PI;
    }
    let inclination = (p.z / range).clamp(-1.0, 1.0).asin();
    Ok(Spherical {
        range,
        azimuth,
        inclination,
    })
}

pub fn spherical_to_cart(s: &Spherical) -> Vec3 {
    let (sin_phi, cos_phi) = s.inclination.sin_cos();
    let (sin_theta, cos_theta) = s.azimuth.sin_cos();
    Vec3::new(
        s.range * cos_phi * cos_theta,
        s.range * cos_phi * sin_theta,
        s.range * sin_phi,
    )
}
