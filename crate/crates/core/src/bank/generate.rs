use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intensity::{IntensityCalibration, IntensityEstimator};
use crate::lidarize::{lidarize_object, Ranged};
use crate::model::{Box3D, ClassLabel, PointCloud, SensorConfig, Vec3};

use super::size::{determine_size, SizeJitterConfig};

/// Entries with fewer points are discarded.
pub const MIN_ENTRY_POINTS: usize = 16;

/// −180° to 180° in 30° steps (13 values).
pub fn default_headings_deg() -> Vec<f64> {
    (0..13).map(|i| -180.0 + 30.0 * i as f64).collect()
}

/// 5 m to 50 m in 5 m steps.
pub fn default_ranges_m() -> Vec<f64> {
    (1..=10).map(|i| 5.0 * i as f64).collect()
}

/// A dense colored object, already axis-aligned.
#[derive(Debug, Clone)]
pub struct BankSource {
    pub class: ClassLabel,
    pub source_id: String,
    pub points: PointCloud,
    /// Whether the aligned +x axis points at the object's front.
    pub front_flag: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectBankEntry {
    pub class: ClassLabel,
    pub source_id: String,
    pub heading_deg: f64,
    pub range_m: f64,
    /// Box-frame points with intensity.
    pub points: PointCloud,
    /// Box-frame box: center at the origin, yaw 0.
    pub bbox: Box3D,
    pub front_flag: bool,
}

impl ObjectBankEntry {
    pub fn heading(&self) -> f64 {
        self.heading_deg.to_radians()
    }

    /// Checks point count against `min_points` and containment in the box
    /// inflated by 1%.
    pub fn validate(&self, min_points: usize) -> Result<()> {
        if self.points.len() < min_points {
            return Err(Error::validation(format!(
                "{} entry {} has {} points, below {min_points}",
                self.class,
                self.source_id,
                self.points.len()
            )));
        }
        if self.points.intensity().is_none() {
            return Err(Error::validation("bank entry points lack intensity"));
        }
        if let Some(i) = self
            .points
            .positions()
            .iter()
            .position(|p| !self.bbox.contains(p, 0.01))
        {
            return Err(Error::validation(format!(
                "{} entry {}: point {i} outside its box",
                self.class, self.source_id
            )));
        }
        Ok(())
    }
}

impl Ranged for ObjectBankEntry {
    fn center_range(&self) -> f64 {
        self.range_m
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenerationReport {
    pub attempted: usize,
    pub kept: usize,
    pub discarded_sparse: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectBank {
    pub entries: Vec<ObjectBankEntry>,
    pub headings_deg: Vec<f64>,
    pub min_points: usize,
}

impl ObjectBank {
    pub fn of_class(&self, class: ClassLabel) -> Vec<&ObjectBankEntry> {
        self.entries.iter().filter(|e| e.class == class).collect()
    }

    pub fn sort(&mut self) {
        self.entries.sort_by(|a, b| {
            a.class
                .cmp(&b.class)
                .then_with(|| a.source_id.cmp(&b.source_id))
                .then(a.heading_deg.total_cmp(&b.heading_deg))
                .then(a.range_m.total_cmp(&b.range_m))
        });
    }
}

#[derive(Debug, Clone)]
pub struct BankParams {
    pub headings_deg: Vec<f64>,
    pub ranges_m: Vec<f64>,
    pub jitter: SizeJitterConfig,
    pub min_points: usize,
    pub seed: u64,
}

impl Default for BankParams {
    fn default() -> Self {
        Self {
            headings_deg: default_headings_deg(),
            ranges_m: default_ranges_m(),
            jitter: SizeJitterConfig::default(),
            min_points: MIN_ENTRY_POINTS,
            seed: 0,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn tuple_seed(seed: u64, parts: [usize; 3]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ p as u64))
}

/// Source points scaled per axis so their bounding box matches `size`,
/// centered at the origin, with the front facing +x.
pub fn fit_to_size(source: &BankSource, size: &Vec3) -> Result<PointCloud> {
    let pts = source.points.positions();
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let extent = hi - lo;
    if extent.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::DegenerateGeometry(format!(
            "source {} is flat along an axis",
            source.source_id
        )));
    }
    let mid = (lo + hi) / 2.0;
    let flip = if source.front_flag { 1.0 } else { -1.0 };
    Ok(source.points.map_positions(|p| {
        let q = (p - mid).component_div(&extent).component_mul(size);
        Vec3::new(flip * q.x, flip * q.y, q.z)
    }))
}

/// Observes every source at every (heading, range) placement and keeps the
/// observations with at least `min_points` returns. Entries come back sorted
/// by (class, source_id, heading, range).
pub fn generate_bank(
    sources: &[BankSource],
    sensor: &SensorConfig,
    params: &BankParams,
    calibration: &IntensityCalibration,
    estimator: &dyn IntensityEstimator,
) -> Result<(ObjectBank, GenerationReport)> {
    sensor.validate()?;
    params.jitter.validate()?;
    if params.headings_deg.is_empty() || params.ranges_m.is_empty() {
        return Err(Error::validation(
            "bank needs at least one heading and one range",
        ));
    }
    if params.ranges_m.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::validation("bank ranges must be positive"));
    }
    for s in sources {
        if s.source_id.is_empty() || s.source_id.contains(char::is_whitespace) {
            return Err(Error::validation(format!(
                "source id `{}` must be non-empty without whitespace",
                s.source_id
            )));
        }
        if s.points.rgb().is_none() {
            return Err(Error::validation(format!(
                "source {} lacks rgb",
                s.source_id
            )));
        }
        calibration.class(s.class)?;
    }
    let tuples: Vec<[usize; 3]> = (0..sources.len())
        .flat_map(|s| {
            (0..params.headings_deg.len())
                .flat_map(move |h| (0..params.ranges_m.len()).map(move |r| [s, h, r]))
        })
        .collect();
    let results = tuples
        .par_iter()
        .map(|&[s, h, r]| {
            let source = &sources[s];
            let size = determine_size(
                source.class,
                &params.jitter,
                tuple_seed(params.seed, [s, h, r]),
            )?;
            let fitted = fit_to_size(source, &size)?;
            let heading_deg = params.headings_deg[h];
            let range_m = params.ranges_m[r];
            let center = Vec3::new(range_m, 0.0, size.z / 2.0 - sensor.sensor_origin.z);
            let seen = lidarize_object(&fitted, &center, heading_deg.to_radians(), sensor)?;
            if seen.len() < params.min_points {
                return Ok(None);
            }
            let half = size / 2.0;
            let clamped = seen
                .without_ring()
                .map_positions(|p| p.sup(&-half).inf(&half));
            let points = estimator.estimate(&clamped, calibration, source.class)?;
            Ok(Some(ObjectBankEntry {
                class: source.class,
                source_id: source.source_id.clone(),
                heading_deg,
                range_m,
                points,
                bbox: Box3D::new(Vec3::zeros(), size, 0.0, source.class)?,
                front_flag: source.front_flag,
            }))
        })
        .collect::<Result<Vec<Option<ObjectBankEntry>>>>()?;
    let attempted = results.len();
    let entries: Vec<ObjectBankEntry> = results.into_iter().flatten().collect();
    let report = GenerationReport {
        attempted,
        kept: entries.len(),
        discarded_sparse: attempted - entries.len(),
    };
    log::info!(
        "bank: {} of {} observations kept, {} below {} points",
        report.kept,
        report.attempted,
        report.discarded_sparse,
        params.min_points
    );
    let mut bank = ObjectBank {
        entries,
        headings_deg: params.headings_deg.clone(),
        min_points: params.min_points,
    };
    bank.sort();
    Ok((bank, report))
}
