use std::path::Path;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::io::{content_lines, parse_f64};
use crate::model::Vec3;

/// Pinhole camera. Camera looks along +z with x right and y down; `rotation`
/// and `translation` map camera coordinates to world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraView {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub height: u32,
    pub width: u32,
    pub rotation: Matrix3<f64>,
    pub translation: Vec3,
}

impl CameraView {
    pub fn new(
        intrinsics: [f64; 4],
        size: (u32, u32),
        rotation: Matrix3<f64>,
        translation: Vec3,
    ) -> Result<Self> {
        let [fx, fy, cx, cy] = intrinsics;
        if !(fx > 0.0 && fy > 0.0) {
            return Err(Error::validation("focal lengths must be positive"));
        }
        let ortho = rotation.transpose() * rotation - Matrix3::identity();
        if ortho.abs().max() > 1e-6 || (rotation.determinant() - 1.0).abs() > 1e-6 {
            return Err(Error::validation("camera rotation is not orthonormal"));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            height: size.0,
            width: size.1,
            rotation,
            translation,
        })
    }

    /// Camera at `eye` looking at `target`, with world +z as the up hint.
    pub fn look_at(
        eye: Vec3,
        target: Vec3,
        intrinsics: [f64; 4],
        size: (u32, u32),
    ) -> Result<Self> {
        let forward = (target - eye)
            .try_normalize(1e-12)
            .ok_or_else(|| Error::validation("camera eye equals target"))?;
        let hint = if forward.cross(&Vec3::z()).norm() < 1e-6 {
            Vec3::y()
        } else {
            Vec3::z()
        };
        let right = forward.cross(&hint).normalize();
        let down = forward.cross(&right);
        let rotation = Matrix3::from_columns(&[right, down, forward]);
        Self::new(intrinsics, size, rotation, eye)
    }

    pub fn origin(&self) -> Vec3 {
        self.translation
    }

    /// Unit world direction through the center of pixel (row, col).
    pub fn ray_direction(&self, row: u32, col: u32) -> Vec3 {
        let d = Vec3::new(
            (col as f64 + 0.5 - self.cx) / self.fx,
            (row as f64 + 0.5 - self.cy) / self.fy,
            1.0,
        );
        (self.rotation * d).normalize()
    }

    pub fn to_line(&self) -> String {
        let r = &self.rotation;
        format!(
            "{} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {}",
            self.fx,
            self.fy,
            self.cx,
            self.cy,
            self.height,
            self.width,
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
            self.translation.x,
            self.translation.y,
            self.translation.z
        )
    }
}

/// Parses `fx fy cx cy H W r11 r12 r13 r21 r22 r23 r31 r32 r33 tx ty tz` lines.
pub fn parse_views(text: &str) -> Result<Vec<CameraView>> {
    let mut views = Vec::new();
    for (line_no, line) in content_lines(text) {
        let v = line
            .split_whitespace()
            .map(|t| parse_f64(t, line_no))
            .collect::<Result<Vec<f64>>>()?;
        if v.len() != 18 {
            return Err(Error::format(format!(
                "line {line_no}: expected 18 camera fields, got {}",
                v.len()
            )));
        }
        let dim = |x: f64| -> Result<u32> {
            if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
                Ok(x as u32)
            } else {
                Err(Error::format(format!("line {line_no}: bad image size {x}")))
            }
        };
        let rotation = Matrix3::new(v[6], v[7], v[8], v[9], v[10], v[11], v[12], v[13], v[14]);
        views.push(CameraView::new(
            [v[0], v[1], v[2], v[3]],
            (dim(v[4])?, dim(v[5])?),
            rotation,
            Vec3::new(v[15], v[16], v[17]),
        )?);
    }
    Ok(views)
}

pub fn read_views(path: &Path) -> Result<Vec<CameraView>> {
    parse_views(&crate::io::read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn look_at_center_ray_hits_target() {
        let cam = CameraView::look_at(
            Vec3::new(5.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 1.0),
            [10.0, 10.0, 2.0, 2.0],
            (4, 4),
        )
        .unwrap();
        let r = cam.rotation;
        assert!((r.determinant() - 1.0).abs() < 1e-12);
        // principal point sits on the pixel corner (2, 2); average the 4 central rays
        let d = (cam.ray_direction(1, 1)
            + cam.ray_direction(1, 2)
            + cam.ray_direction(2, 1)
            + cam.ray_direction(2, 2))
        .normalize();
        assert!((d - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn text_roundtrip_and_errors() {
        let cam = CameraView::look_at(
            Vec3::new(0.0, 3.0, 0.0),
            Vec3::zeros(),
            [5.0, 5.0, 1.0, 1.0],
            (2, 2),
        )
        .unwrap();
        let parsed = parse_views(&format!("# views\n{}\n", cam.to_line())).unwrap();
        assert_eq!(parsed, vec![cam]);
        assert!(parse_views("1 2 3").is_err());
        let skewed = "1 1 0 0 2 2 1 0 0 0 2 0 0 0 1 0 0 0";
        assert!(matches!(parse_views(skewed), Err(Error::Validation(_))));
    }
}
