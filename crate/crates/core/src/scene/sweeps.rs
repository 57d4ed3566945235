use nalgebra::Rotation3;

use crate::error::{Error, Result};
use crate::model::{PointCloud, Vec3};

/// Constant-turn-rate, constant-speed trajectory sampled backwards in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    pub speed: f64,
    pub yaw_rate: f64,
    pub sweeps: usize,
    pub dt: f64,
}

/// Pose change (dx, dy, dθ) after `t` seconds moving along +x.
fn ctrv_offset(speed: f64, yaw_rate: f64, t: f64) -> (f64, f64, f64) {
    let th = yaw_rate * t;
    if yaw_rate.abs() < 1e-9 {
        (speed * t, 0.0, th)
    } else {
        (
            speed / yaw_rate * th.sin(),
            speed / yaw_rate * (1.0 - th.cos()),
            th,
        )
    }
}

/// Stacks K rigid copies of box-frame points at the object's poses for
/// t = −k·dt, each tagged with that time offset.
pub fn virtual_sweeps(points: &PointCloud, params: &SweepParams) -> Result<PointCloud> {
    if params.sweeps == 0 || !(params.dt > 0.0) {
        return Err(Error::validation("sweeps need K ≥ 1 and dt > 0"));
    }
    if !params.speed.is_finite() || !params.yaw_rate.is_finite() {
        return Err(Error::validation("sweep trajectory must be finite"));
    }
    let base = points.clone().without_time_offset();
    let mut out: Option<PointCloud> = None;
    for k in 0..params.sweeps {
        let t = -(k as f64) * params.dt;
        let (dx, dy, th) = ctrv_offset(params.speed, params.yaw_rate, t);
        let rot = Rotation3::from_axis_angle(&Vec3::z_axis(), th);
        let shift = Vec3::new(dx, dy, 0.0);
        let copy = base
            .map_positions(|p| rot * p + shift)
            .with_time_offset(vec![t; base.len()])?;
        out = Some(match out {
            None => copy,
            Some(acc) => acc.concat(&copy),
        });
    }
    Ok(out.expect("at least one sweep"))
}
