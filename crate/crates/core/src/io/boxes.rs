use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Box3D, ClassLabel, Vec3};

use super::{content_lines, parse_f64};

/// Parses `class cx cy cz dx dy dz yaw [score]` lines; `#` starts a comment.
pub fn parse_boxes(text: &str) -> Result<Vec<Box3D>> {
    let mut boxes = Vec::new();
    for (line_no, line) in content_lines(text) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 8 && tokens.len() != 9 {
            return Err(Error::format(format!(
                "line {line_no}: expected `class cx cy cz dx dy dz yaw [score]`, got {} fields",
                tokens.len()
            )));
        }
        let class: ClassLabel = tokens[0].parse()?;
        let v: Vec<f64> = tokens[1..]
            .iter()
            .map(|t| parse_f64(t, line_no))
            .collect::<Result<_>>()?;
        let mut b = Box3D::new(
            Vec3::new(v[0], v[1], v[2]),
            Vec3::new(v[3], v[4], v[5]),
            v[6],
            class,
        )?;
        if let Some(&score) = v.get(7) {
            b = b.with_score(score);
        }
        boxes.push(b);
    }
    Ok(boxes)
}

pub fn read_boxes(path: &Path) -> Result<Vec<Box3D>> {
    parse_boxes(&super::read_text(path)?)
}

pub fn format_boxes(boxes: &[Box3D]) -> String {
    let mut out = String::from("# class cx cy cz dx dy dz yaw\n");
    for b in boxes {
        let _ = write!(
            out,
            "{} {} {} {} {} {} {} {}",
            b.class_label, b.center.x, b.center.y, b.center.z, b.size.x, b.size.y, b.size.z, b.yaw
        );
        if let Some(s) = b.score {
            let _ = write!(out, " {s}");
        }
        out.push('\n');
    }
    out
}

pub fn write_boxes(boxes: &[Box3D], path: &Path) -> Result<()> {
    super::write_bytes(path, format_boxes(boxes).as_bytes())
}
