use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{PointCloud, Vec3};

/// Record layout of a flat little-endian f32 point binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinLayout {
    Xyzi,
    Xyzir,
    Xyzit,
}

impl BinLayout {
    pub fn floats_per_point(self) -> usize {
        match self {
            BinLayout::Xyzi => 4,
            BinLayout::Xyzir | BinLayout::Xyzit => 5,
        }
    }

    pub fn record_size(self) -> usize {
        self.floats_per_point() * 4
    }
}

impl fmt::Display for BinLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BinLayout::Xyzi => "xyzi",
            BinLayout::Xyzir => "xyzir",
            BinLayout::Xyzit => "xyzit",
        })
    }
}

impl FromStr for BinLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xyzi" => Ok(BinLayout::Xyzi),
            "xyzir" => Ok(BinLayout::Xyzir),
            "xyzit" => Ok(BinLayout::Xyzit),
            other => Err(Error::validation(format!("unknown point layout `{other}`"))),
        }
    }
}

pub fn read_lidar_bin(path: &Path, layout: BinLayout) -> Result<PointCloud> {
    read_lidar_bin_scaled(path, layout, 1.0)
}

/// Reads a point binary, dividing raw intensities by `intensity_divisor`
/// (255 for datasets storing 0–255 reflectance).
pub fn read_lidar_bin_scaled(
    path: &Path,
    layout: BinLayout,
    intensity_divisor: f64,
) -> Result<PointCloud> {
    let bytes = super::read_bytes(path)?;
    decode_lidar_records(&bytes, layout, intensity_divisor)
}

pub fn decode_lidar_records(
    bytes: &[u8],
    layout: BinLayout,
    intensity_divisor: f64,
) -> Result<PointCloud> {
    if !(intensity_divisor > 0.0) {
        return Err(Error::validation("intensity divisor must be positive"));
    }
    let rec = layout.record_size();
    let whole = bytes.len() / rec * rec;
    if whole != bytes.len() {
        return Err(Error::format_at(
            whole as u64,
            format!(
                "truncated record: {} trailing bytes, record size {rec}",
                bytes.len() - whole
            ),
        ));
    }
    let n = bytes.len() / rec;
    let mut positions = Vec::with_capacity(n);
    let mut intensity = Vec::with_capacity(n);
    let mut extra = Vec::with_capacity(n);
    for (i, chunk) in bytes.chunks_exact(rec).enumerate() {
        let f: Vec<f32> = chunk
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        if f[..3].iter().any(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
        positions.push(Vec3::new(f[0] as f64, f[1] as f64, f[2] as f64));
        let value = f[3] as f64 / intensity_divisor;
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::validation(format!(
                "point {i} intensity {} outside [0, 1] after dividing by {intensity_divisor}",
                f[3]
            )));
        }
        intensity.push(value);
        if f.len() > 4 {
            extra.push(f[4]);
        }
    }
    let cloud = PointCloud::new(positions).with_intensity(intensity)?;
    match layout {
        BinLayout::Xyzi => Ok(cloud),
        BinLayout::Xyzir => {
            let mut ring = Vec::with_capacity(n);
            for (i, &r) in extra.iter().enumerate() {
                if !(r >= 0.0 && r.fract() == 0.0 && r <= u32::MAX as f32) {
                    return Err(Error::validation(format!(
                        "point {i} ring {r} is not a non-negative integer"
                    )));
                }
                ring.push(r as u32);
            }
            cloud.with_ring(ring)
        }
        BinLayout::Xyzit => {
            if let Some(i) = extra.iter().position(|t| !t.is_finite()) {
                return Err(Error::validation(format!(
                    "point {i} has a non-finite time offset"
                )));
            }
            cloud.with_time_offset(extra.iter().map(|&t| t as f64).collect())
        }
    }
}

pub fn encode_lidar_records(cloud: &PointCloud, layout: BinLayout) -> Result<Vec<u8>> {
    let intensity = cloud
        .intensity()
        .ok_or_else(|| Error::validation(format!("layout {layout} needs an intensity channel")))?;
    let ring = match layout {
        BinLayout::Xyzir => Some(
            cloud
                .ring()
                .ok_or_else(|| Error::validation("layout xyzir needs a ring channel"))?,
        ),
        _ => None,
    };
    let time = match layout {
        BinLayout::Xyzit => Some(
            cloud
                .time_offset()
                .ok_or_else(|| Error::validation("layout xyzit needs a time_offset channel"))?,
        ),
        _ => None,
    };
    let mut out = Vec::with_capacity(cloud.len() * layout.record_size());
    for (i, p) in cloud.positions().iter().enumerate() {
        let mut rec = vec![p.x as f32, p.y as f32, p.z as f32, intensity[i] as f32];
        if let Some(r) = ring {
            rec.push(r[i] as f32);
        }
        if let Some(t) = time {
            rec.push(t[i] as f32);
        }
        for v in rec {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn write_lidar_bin(cloud: &PointCloud, layout: BinLayout, path: &Path) -> Result<()> {
    let bytes = encode_lidar_records(cloud, layout)?;
    super::write_bytes(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(values: &[f32]) -> Vec<u8> {
        values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    #[test]
    fn decode_single_xyzir_record() {
        let bytes = record(&[1.0, 2.0, 3.0, 0.5, 7.0]);
        assert_eq!(bytes.len(), 20);
        let c = decode_lidar_records(&bytes, BinLayout::Xyzir, 1.0).unwrap();
        assert_eq!(c.positions(), &[Vec3::new(1.0, 2.0, 3.0)]);
        assert_eq!(c.intensity().unwrap(), &[0.5]);
        assert_eq!(c.ring().unwrap(), &[7]);
        assert_eq!(encode_lidar_records(&c, BinLayout::Xyzir).unwrap(), bytes);
    }

    #[test]
    fn empty_and_truncated() {
        assert!(decode_lidar_records(&[], BinLayout::Xyzir, 1.0)
            .unwrap()
            .is_empty());
        let mut bytes = record(&[1.0, 2.0, 3.0, 0.5, 7.0]);
        bytes.push(0);
        match decode_lidar_records(&bytes, BinLayout::Xyzir, 1.0) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, Some(20)),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn nan_coordinate_names_point() {
        let bytes = record(&[0.0, 0.0, 0.0, 0.1, 1.0, f32::NAN, 0.0, 0.1]);
        let err = decode_lidar_records(&bytes, BinLayout::Xyzi, 1.0).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("point 1")));
    }

    #[test]
    fn intensity_divisor_normalizes() {
        let bytes = record(&[0.0, 0.0, 1.0, 255.0]);
        let c = decode_lidar_records(&bytes, BinLayout::Xyzi, 255.0).unwrap();
        assert_eq!(c.intensity().unwrap(), &[1.0]);
        assert!(decode_lidar_records(&bytes, BinLayout::Xyzi, 1.0).is_err());
    }

    #[test]
    fn missing_channel_rejected_on_write() {
        let c = PointCloud::new(vec![Vec3::x()]);
        assert!(matches!(
            encode_lidar_records(&c, BinLayout::Xyzi),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn three_xyzir_points_take_60_bytes() {
        let c = PointCloud::new(vec![Vec3::x(); 3])
            .with_intensity(vec![0.1; 3])
            .unwrap()
            .with_ring(vec![1, 2, 3])
            .unwrap();
        assert_eq!(
            encode_lidar_records(&c, BinLayout::Xyzir).unwrap().len(),
            60
        );
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        let bytes = record(&[1.0, 2.0, 3.0, 0.5, 7.0]);
        std::fs::write(&path, &bytes).unwrap();
        let c = read_lidar_bin(&path, BinLayout::Xyzir).unwrap();
        let out = dir.path().join("g.bin");
        write_lidar_bin(&c, BinLayout::Xyzir, &out).unwrap();
        assert_eq!(std::fs::read(&out).unwrap(), bytes);
    }

    fn layout_strategy() -> impl Strategy<Value = BinLayout> {
        prop_oneof![
            Just(BinLayout::Xyzi),
            Just(BinLayout::Xyzir),
            Just(BinLayout::Xyzit)
        ]
    }

    proptest! {
        #[test]
        fn write_read_is_byte_identity(
            layout in layout_strategy(),
            pts in prop::collection::vec(
                (-100f32..100f32, -100f32..100f32, -10f32..10f32, 0f32..=1f32, 0u32..64, -0.5f32..0.0f32),
                0..50)
        ) {
            let bytes: Vec<u8> = pts.iter().flat_map(|&(x, y, z, i, r, t)| {
                let mut rec = vec![x, y, z, i];
                match layout {
                    BinLayout::Xyzi => {}
                    BinLayout::Xyzir => rec.push(r as f32),
                    BinLayout::Xyzit => rec.push(t),
                }
                record(&rec)
            }).collect();
            let cloud = decode_lidar_records(&bytes, layout, 1.0).unwrap();
            prop_assert_eq!(encode_lidar_records(&cloud, layout).unwrap(), bytes);
        }
    }
}
