use crate::model::{cart_to_spherical, PointCloud, SensorConfig, Vec3};

/// Angular slack on the FOV gate so that points constructed exactly on the
/// FOV edge survive round-off in `asin`.
const FOV_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeCell {
    pub depth: f64,
    pub source_index: usize,
}

/// Where a sensor-frame point lands in the range image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellLookup {
    Cell { u: usize, v: usize, range: f64 },
    AtOrigin,
    OutsideFov,
    BeyondRange,
}

/// Column `u = floor(W(θ/π + 1)/2) mod W`; row
/// `v = floor(H(1 − (φ + FOV_down)/FOV_total))`, clamped to the image for φ
/// inside the FOV.
pub fn cell_of(p: &Vec3, config: &SensorConfig) -> CellLookup {
    let Ok(s) = cart_to_spherical(p) else {
        return CellLookup::AtOrigin;
    };
    if s.range > config.max_range {
        return CellLookup::BeyondRange;
    }
    let (up, down, total) = (
        config.fov_up_rad(),
        config.fov_down_rad(),
        config.fov_total_rad(),
    );
    if s.inclination > up + FOV_EPS || s.inclination < -down - FOV_EPS {
        return CellLookup::OutsideFov;
    }
    let (h, w) = (config.channels, config.azimuth_resolution);
    let u = ((w as f64 * (s.azimuth / std::f64::consts::PI + 1.0) / 2.0).floor() as usize) % w;
    let v_raw = (h as f64 * (1.0 - (s.inclination + down) / total)).floor();
    let v = v_raw.clamp(0.0, (h - 1) as f64) as usize;
    CellLookup::Cell {
        u,
        v,
        range: s.range,
    }
}

/// H×W grid of nearest returns.
#[derive(Debug, Clone)]
pub struct RangeImage {
    config: SensorConfig,
    cells: Vec<Option<RangeCell>>,
    pub skipped_origin: usize,
    pub discarded_fov: usize,
    pub discarded_range: usize,
}

impl RangeImage {
    pub fn empty(config: &SensorConfig) -> Self {
        Self {
            config: config.clone(),
            cells: vec![None; config.channels * config.azimuth_resolution],
            skipped_origin: 0,
            discarded_fov: 0,
            discarded_range: 0,
        }
    }

    pub fn config(&self) -> &SensorConfig {
        &self.config
    }

    pub fn height(&self) -> usize {
        self.config.channels
    }

    pub fn width(&self) -> usize {
        self.config.azimuth_resolution
    }

    pub fn get(&self, u: usize, v: usize) -> Option<&RangeCell> {
        self.cells[v * self.width() + u].as_ref()
    }

    /// Keeps the candidate if it is strictly nearer than the current holder.
    pub fn offer(&mut self, u: usize, v: usize, depth: f64, source_index: usize) {
        let w = self.width();
        let slot = &mut self.cells[v * w + u];
        match slot {
            Some(cell) if cell.depth <= depth => {}
            _ => {
                *slot = Some(RangeCell {
                    depth,
                    source_index,
                })
            }
        }
    }

    /// Occupied cells as (v, u, cell), row-major.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize, &RangeCell)> + '_ {
        let w = self.width();
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| c.as_ref().map(|c| (i / w, i % w, c)))
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }
}

/// Bins sensor-frame points, keeping the minimum-range point per cell (ties go
/// to the lower point index). Points at the origin, outside the vertical FOV
/// or beyond `max_range` are counted and dropped.
pub fn project_to_range(points: &PointCloud, config: &SensorConfig) -> RangeImage {
    let mut image = RangeImage::empty(config);
    for (i, p) in points.positions().iter().enumerate() {
        match cell_of(p, config) {
            CellLookup::Cell { u, v, range } => image.offer(u, v, range, i),
            CellLookup::AtOrigin => image.skipped_origin += 1,
            CellLookup::OutsideFov => image.discarded_fov += 1,
            CellLookup::BeyondRange => image.discarded_range += 1,
        }
    }
    image
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{spherical_to_cart, Spherical};

    fn at(range: f64, az_deg: f64, inc_deg: f64) -> Vec3 {
        spherical_to_cart(&Spherical {
            range,
            azimuth: az_deg.to_radians(),
            inclination: inc_deg.to_radians(),
        })
    }

    #[test]
    fn top_edge_point_lands_in_row_zero() {
        let c = SensorConfig::nuscenes();
        match cell_of(&at(10.0, 0.0, 10.0), &c) {
            CellLookup::Cell { u, v, range } => {
                assert_eq!((u, v), (540, 0));
                assert!((range - 10.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        match cell_of(&at(10.0, 0.0, -30.0), &c) {
            CellLookup::Cell { v, .. } => assert_eq!(v, 31),
            other => panic!("{other:?}"),
        }
        assert_eq!(cell_of(&at(10.0, 0.0, 15.0), &c), CellLookup::OutsideFov);
        assert_eq!(cell_of(&at(10.0, 0.0, -31.0), &c), CellLookup::OutsideFov);
        assert_eq!(cell_of(&Vec3::zeros(), &c), CellLookup::AtOrigin);
        assert_eq!(cell_of(&at(150.0, 0.0, 0.0), &c), CellLookup::BeyondRange);
    }

    #[test]
    fn min_depth_wins() {
        let c = SensorConfig::nuscenes();
        let cloud = PointCloud::new(vec![at(7.0, 5.0, 0.0), at(5.0, 5.0, 0.0), Vec3::zeros()]);
        let img = project_to_range(&cloud, &c);
        assert_eq!(img.occupied_count(), 1);
        let (_, _, cell) = img.occupied().next().unwrap();
        assert_eq!(cell.source_index, 1);
        assert!((cell.depth - 5.0).abs() < 1e-12);
        assert_eq!(img.skipped_origin, 1);
    }

    #[test]
    fn azimuth_wraps() {
        let c = SensorConfig::nuscenes();
        match cell_of(&Vec3::new(-10.0, 0.0, 0.0), &c) {
            CellLookup::Cell { u, .. } => assert_eq!(u, 0),
            other => panic!("{other:?}"),
        }
    }
}
