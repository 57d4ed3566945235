use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::PointCloud;

use super::ground::GroundEstimate;

pub const DEFAULT_RADIUS: f64 = 51.2;
pub const DEFAULT_RESOLUTION: f64 = 0.128;

/// Ego-centered square BEV grid of insertable (1) / blocked (0) pixels.
///
/// Pixel (ix, iy) covers x ∈ [ox − r + ix·res, ox − r + (ix+1)·res) and the
/// same along y. Storage and PGM rows run along +y, columns along +x.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityRaster {
    origin: [f64; 2],
    radius: f64,
    resolution: f64,
    size: usize,
    cells: Vec<u8>,
}

impl FeasibilityRaster {
    /// All-blocked raster with P = round(2r / res) pixels per side.
    pub fn new(origin: [f64; 2], radius: f64, resolution: f64) -> Result<Self> {
        if !(radius > 0.0 && resolution > 0.0) || !radius.is_finite() || !resolution.is_finite() {
            return Err(Error::validation(
                "raster radius and resolution must be positive",
            ));
        }
        let size = (2.0 * radius / resolution).round() as usize;
        if size == 0 {
            return Err(Error::validation("raster has no pixels"));
        }
        Ok(Self {
            origin,
            radius,
            resolution,
            size,
            cells: vec![0; size * size],
        })
    }

    pub fn with_defaults() -> Self {
        Self::new([0.0, 0.0], DEFAULT_RADIUS, DEFAULT_RESOLUTION).expect("valid defaults")
    }

    pub fn filled(mut self, value: bool) -> Self {
        self.cells.fill(value as u8);
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.cells[iy * self.size + ix] != 0
    }

    pub fn set(&mut self, ix: usize, iy: usize, value: bool) {
        self.cells[iy * self.size + ix] = value as u8;
    }

    pub fn pixel_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = ((x - self.origin[0] + self.radius) / self.resolution).floor();
        let fy = ((y - self.origin[1] + self.radius) / self.resolution).floor();
        let p = self.size as f64;
        (fx >= 0.0 && fx < p && fy >= 0.0 && fy < p).then_some((fx as usize, fy as usize))
    }

    pub fn pixel_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.origin[0] - self.radius + (ix as f64 + 0.5) * self.resolution,
            self.origin[1] - self.radius + (iy as f64 + 0.5) * self.resolution,
        )
    }

    /// Feasibility of the pixel under (x, y); outside the raster is blocked.
    pub fn feasible_at(&self, x: f64, y: f64) -> bool {
        self.pixel_of(x, y).is_some_and(|(ix, iy)| self.get(ix, iy))
    }

    pub fn feasible_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 0).count()
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.size == other.size
            && (self.resolution - other.resolution).abs() <= 1e-12
            && (self.radius - other.radius).abs() <= 1e-9
            && (self.origin[0] - other.origin[0]).abs() <= 1e-9
            && (self.origin[1] - other.origin[1]).abs() <= 1e-9
    }

    /// Number of points falling in each pixel.
    pub fn count_points(&self, points: &PointCloud) -> Vec<u32> {
        let mut counts = vec![0u32; self.cells.len()];
        for p in points.positions() {
            if let Some((ix, iy)) = self.pixel_of(p.x, p.y) {
                counts[iy * self.size + ix] += 1;
            }
        }
        counts
    }

    /// Binary PGM with maxval 1.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n1\n", self.size, self.size).into_bytes();
        out.extend_from_slice(&self.cells);
        out
    }

    /// Reads a P5 image; any non-zero pixel counts as insertable.
    pub fn from_pgm(bytes: &[u8], origin: [f64; 2], radius: f64, resolution: f64) -> Result<Self> {
        let mut pos = 0usize;
        let mut fields = Vec::with_capacity(4);
        while fields.len() < 4 {
            while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
                if bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                } else {
                    pos += 1;
                }
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::format_at(pos as u64, "PGM header truncated"));
            }
            fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
        if fields[0] != "P5" {
            return Err(Error::format_at(
                0,
                format!("expected P5 PGM, found `{}`", fields[0]),
            ));
        }
        let num = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::format(format!("bad PGM header value `{s}`")))
        };
        let (w, h, maxval) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
        if maxval == 0 || maxval > 255 {
            return Err(Error::format(format!("PGM maxval {maxval} is not 8-bit")));
        }
        pos += 1; // single whitespace after maxval
        let mut raster = Self::new(origin, radius, resolution)?;
        if w != raster.size || h != raster.size {
            return Err(Error::validation(format!(
                "map raster is {w}x{h}, geometry expects {0}x{0}",
                raster.size
            )));
        }
        let body = bytes.get(pos..).unwrap_or(&[]);
        if body.len() != w * h {
            return Err(Error::format_at(
                pos as u64,
                format!("PGM body has {} bytes, expected {}", body.len(), w * h),
            ));
        }
        for (c, &b) in raster.cells.iter_mut().zip(body) {
            *c = (b != 0) as u8;
        }
        Ok(raster)
    }

    fn meta_path(path: &Path) -> PathBuf {
        let mut s = path.as_os_str().to_owned();
        s.push(".meta");
        PathBuf::from(s)
    }

    /// Writes `path` (PGM) and `path.meta` (`origin_x origin_y resolution radius`).
    pub fn write(&self, path: &Path) -> Result<()> {
        crate::io::write_bytes(path, &self.to_pgm())?;
        let meta = format!(
            "{} {} {} {}\n",
            self.origin[0], self.origin[1], self.resolution, self.radius
        );
        crate::io::write_bytes(&Self::meta_path(path), meta.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let meta_path = Self::meta_path(path);
        let meta = crate::io::read_text(&meta_path)?;
        let vals = crate::io::content_lines(&meta)
            .flat_map(|(n, l)| l.split_whitespace().map(move |t| (n, t)))
            .map(|(n, t)| crate::io::parse_f64(t, n))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 4 {
            return Err(Error::format(format!(
                "{}: expected `origin_x origin_y resolution radius`",
                meta_path.display()
            )));
        }
        Self::from_pgm(
            &crate::io::read_bytes(path)?,
            [vals[0], vals[1]],
            vals[3],
            vals[2],
        )
    }
}

/// Pixel rule: below `density_threshold` points the map decides, otherwise
/// the pixel is feasible iff it holds a ground inlier.
pub fn fuse_feasibility_from_counts(
    map: &FeasibilityRaster,
    counts: &[u32],
    ground_mask: &[bool],
    density_threshold: u32,
) -> Result<FeasibilityRaster> {
    if counts.len() != map.cells.len() || ground_mask.len() != map.cells.len() {
        return Err(Error::validation(format!(
            "raster geometry mismatch: map has {} pixels, counts {}, ground mask {}",
            map.cells.len(),
            counts.len(),
            ground_mask.len()
        )));
    }
    let mut out = map.clone();
    for (i, c) in out.cells.iter_mut().enumerate() {
        if counts[i] >= density_threshold {
            *c = ground_mask[i] as u8;
        }
    }
    Ok(out)
}

/// Fuses a map raster with the frame's point density and ground inliers.
/// An all-blocked map gives ground-only feasibility.
pub fn fuse_feasibility(
    map: &FeasibilityRaster,
    ground: &GroundEstimate,
    points: &PointCloud,
    density_threshold: u32,
) -> Result<FeasibilityRaster> {
    let counts = map.count_points(points);
    let mut mask = vec![false; counts.len()];
    for &i in &ground.inliers {
        let p = points.positions().get(i).ok_or_else(|| {
            Error::validation(format!("ground inlier {i} outside the point cloud"))
        })?;
        if let Some((ix, iy)) = map.pixel_of(p.x, p.y) {
            mask[iy * map.size + ix] = true;
        }
    }
    fuse_feasibility_from_counts(map, &counts, &mask, density_threshold)
}
