//! Bit-exact readers and writers for point binaries, PLY and box text files.

mod boxes;
mod lidar_bin;
mod ply;

use std::path::Path;

pub use boxes::{format_boxes, parse_boxes, read_boxes, write_boxes};
pub use lidar_bin::{
    decode_lidar_records, encode_lidar_records, read_lidar_bin, read_lidar_bin_scaled,
    write_lidar_bin, BinLayout,
};
pub use ply::{parse_ply, read_ply_rgb, write_ply};

use crate::error::{Error, Result};

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Splits a line-oriented text file into non-empty, comment-stripped lines
/// paired with their 1-based line number.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        }
        .trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub(crate) fn parse_f64(token: &str, line: usize) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| Error::format(format!("line {line}: `{token}` is not a number")))
}
