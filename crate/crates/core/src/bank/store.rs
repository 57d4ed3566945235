use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::intensity::IntensityCalibration;
use crate::io::{content_lines, parse_f64, read_lidar_bin, read_text, write_bytes, BinLayout};
use crate::model::{Box3D, ClassLabel, Vec3};

use super::generate::{ObjectBank, ObjectBankEntry};

pub const MANIFEST_FILE: &str = "manifest";
pub const CALIBRATION_FILE: &str = "calibration";
pub const ENTRIES_DIR: &str = "entries";

fn entry_path(i: usize) -> String {
    format!("{ENTRIES_DIR}/{i:06}.bin")
}

fn manifest_text(bank: &ObjectBank) -> String {
    let mut s = String::from("# pgt object bank\n");
    let _ = writeln!(s, "min_points {}", bank.min_points);
    s.push_str("headings");
    for h in &bank.headings_deg {
        let _ = write!(s, " {h}");
    }
    s.push('\n');
    s.push_str("# class source_id heading_deg range_m n_points path front_flag dx dy dz\n");
    for (i, e) in bank.entries.iter().enumerate() {
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {} {} {} {}",
            e.class,
            e.source_id,
            e.heading_deg,
            e.range_m,
            e.points.len(),
            entry_path(i),
            e.front_flag,
            e.bbox.size.x,
            e.bbox.size.y,
            e.bbox.size.z
        );
    }
    s
}

/// Writes `manifest`, `entries/NNNNNN.bin` (XYZI, box frame) and, when given,
/// the `calibration` sibling file.
pub fn write_bank(
    dir: &Path,
    bank: &ObjectBank,
    calibration: Option<&IntensityCalibration>,
) -> Result<()> {
    for e in &bank.entries {
        if e.source_id.is_empty() || e.source_id.contains(char::is_whitespace) {
            return Err(Error::validation(format!(
                "bad source id `{}`",
                e.source_id
            )));
        }
    }
    for (i, e) in bank.entries.iter().enumerate() {
        let bytes = crate::io::encode_lidar_records(&e.points, BinLayout::Xyzi)?;
        write_bytes(&dir.join(entry_path(i)), &bytes)?;
    }
    write_bytes(&dir.join(MANIFEST_FILE), manifest_text(bank).as_bytes())?;
    if let Some(cal) = calibration {
        cal.write(&dir.join(CALIBRATION_FILE))?;
    }
    Ok(())
}

/// Loads a bank directory, checking every entry's point count and containment.
pub fn read_bank(dir: &Path) -> Result<ObjectBank> {
    let text = read_text(&dir.join(MANIFEST_FILE))?;
    let mut min_points = None;
    let mut headings_deg = Vec::new();
    let mut entries = Vec::new();
    for (line_no, line) in content_lines(&text) {
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            ["min_points", v] => {
                min_points =
                    Some(v.parse::<usize>().map_err(|_| {
                        Error::format(format!("line {line_no}: bad min_points `{v}`"))
                    })?)
            }
            ["headings", rest @ ..] => {
                headings_deg = rest
                    .iter()
                    .map(|t| parse_f64(t, line_no))
                    .collect::<Result<_>>()?
            }
            [class, source_id, heading, range, n, path, front, dx, dy, dz] => {
                let class: ClassLabel = class.parse().map_err(|_| {
                    Error::format(format!("line {line_no}: unknown class `{class}`"))
                })?;
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::format(format!("line {line_no}: bad point count `{n}`")))?;
                let front_flag: bool = front.parse().map_err(|_| {
                    Error::format(format!("line {line_no}: bad front flag `{front}`"))
                })?;
                let size = Vec3::new(
                    parse_f64(dx, line_no)?,
                    parse_f64(dy, line_no)?,
                    parse_f64(dz, line_no)?,
                );
                let points = read_lidar_bin(&dir.join(path), BinLayout::Xyzi)?;
                if points.len() != n {
                    return Err(Error::format(format!(
                        "line {line_no}: manifest lists {n} points, {path} holds {}",
                        points.len()
                    )));
                }
                entries.push(ObjectBankEntry {
                    class,
                    source_id: source_id.to_string(),
                    heading_deg: parse_f64(heading, line_no)?,
                    range_m: parse_f64(range, line_no)?,
                    points,
                    bbox: Box3D::new(Vec3::zeros(), size, 0.0, class)?,
                    front_flag,
                });
            }
            _ => {
                return Err(Error::format(format!(
                    "line {line_no}: unrecognized manifest line"
                )))
            }
        }
    }
    let min_points = min_points.ok_or_else(|| Error::format("manifest is missing min_points"))?;
    for e in &entries {
        e.validate(min_points)?;
    }
    Ok(ObjectBank {
        entries,
        headings_deg,
        min_points,
    })
}
