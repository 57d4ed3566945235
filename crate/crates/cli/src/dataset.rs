//! Frame directories, ground-truth crops and object-set loading.

use std::path::{Path, PathBuf};

use anyhow::Context;
use pgt_core::bank::{read_bank, ObjectBankEntry, MANIFEST_FILE};
use pgt_core::io::{read_boxes, read_lidar_bin_scaled, BinLayout};
use pgt_core::model::normalize_angle;
use pgt_core::{Box3D, ClassLabel, LidarFrame, Vec3};

/// How frame binaries are decoded.
#[derive(Debug, Clone, Copy)]
pub struct FrameFormat {
    pub layout: BinLayout,
    pub intensity_divisor: f64,
}

pub struct NamedFrame {
    pub name: String,
    pub frame: LidarFrame,
}

/// `NAME.bin` files of a directory in name order.
pub fn frame_paths(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir).map_err(|e| pgt_core::Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut out = Vec::new();
    for entry in rd {
        let path = entry
            .with_context(|| format!("listing {}", dir.display()))?
            .path();
        if path.extension().is_some_and(|e| e == "bin") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Reads `NAME.bin` and its optional `NAME.boxes` sidecar.
pub fn read_frame(path: &Path, format: FrameFormat) -> pgt_core::Result<NamedFrame> {
    let points = read_lidar_bin_scaled(path, format.layout, format.intensity_divisor)?;
    let boxes_path = path.with_extension("boxes");
    let boxes = if boxes_path.exists() {
        read_boxes(&boxes_path)?
    } else {
        Vec::new()
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(NamedFrame {
        name,
        frame: LidarFrame::new(points, boxes),
    })
}

pub fn read_frames(dir: &Path, format: FrameFormat) -> anyhow::Result<Vec<NamedFrame>> {
    frame_paths(dir)?
        .iter()
        .map(|p| read_frame(p, format).map_err(Into::into))
        .collect()
}

/// Box-frame crops of every labeled object with at least `min_points`
/// returns. Heading is the yaw relative to the center's azimuth.
pub fn crop_objects(
    frame: &NamedFrame,
    min_points: usize,
) -> pgt_core::Result<Vec<ObjectBankEntry>> {
    let cloud = &frame.frame.points;
    let mut out = Vec::new();
    for (i, b) in frame.frame.boxes.iter().enumerate() {
        let inside = cloud.filter(|_, p| b.contains(p, 0.0));
        if inside.len() < min_points || inside.intensity().is_none() {
            continue;
        }
        let points = inside
            .map_positions(|p| b.to_local(p))
            .without_ring()
            .without_time_offset();
        let heading = normalize_angle(b.yaw - b.center.y.atan2(b.center.x));
        out.push(ObjectBankEntry {
            class: b.class_label,
            source_id: format!("{}:{i}", frame.name),
            heading_deg: heading.to_degrees(),
            range_m: b.center.x.hypot(b.center.y),
            points,
            bbox: Box3D::new(Vec3::zeros(), b.size, 0.0, b.class_label)?,
            front_flag: true,
        });
    }
    Ok(out)
}

pub fn is_bank_dir(path: &Path) -> bool {
    path.join(MANIFEST_FILE).is_file()
}

/// Objects of a bank directory, or crops of a frame directory.
pub fn load_objects(
    path: &Path,
    format: FrameFormat,
    min_points: usize,
) -> anyhow::Result<Vec<ObjectBankEntry>> {
    if is_bank_dir(path) {
        return Ok(read_bank(path)?.entries);
    }
    let mut out = Vec::new();
    for f in read_frames(path, format)? {
        out.extend(crop_objects(&f, min_points)?);
    }
    Ok(out)
}

pub fn classes_of(entries: &[ObjectBankEntry]) -> Vec<ClassLabel> {
    let mut v: Vec<ClassLabel> = entries.iter().map(|e| e.class).collect();
    v.sort();
    v.dedup();
    v
}
