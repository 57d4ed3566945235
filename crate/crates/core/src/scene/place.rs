use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rand::{Rng, RngCore};

use crate::bank::ObjectBankEntry;
use crate::error::Result;
use crate::model::{normalize_angle, Box3D, LidarFrame, PointCloud, SensorConfig, Vec3};
use crate::registry::Registry;

use super::bandit::BanditGrid;
use super::geometry::obb_overlap;
use super::ground::GroundEstimate;
use super::occlusion::{occlusion_keep_mask, DEFAULT_OCCLUSION_EPS};
use super::raster::FeasibilityRaster;
use super::sweeps::{virtual_sweeps, SweepParams};

/// Feasible pixel centers available to one insertion, optionally grouped by
/// bandit cell.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub centers: Vec<(f64, f64)>,
    pub by_cell: BTreeMap<usize, Vec<usize>>,
}

impl CandidateSet {
    pub fn new(centers: Vec<(f64, f64)>, bandit: Option<&BanditGrid>) -> Self {
        let mut by_cell: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        if let Some(g) = bandit {
            for (i, &(x, y)) in centers.iter().enumerate() {
                if let Some(c) = g.cell_of(x, y) {
                    by_cell.entry(c).or_default().push(i);
                }
            }
        }
        Self { centers, by_cell }
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Chooses where the next insertion attempt goes.
pub trait PlacementSampler: Send + Sync {
    fn name(&self) -> &'static str;
    /// Index into `candidates.centers`, or `None` when nothing is available.
    fn propose(
        &self,
        candidates: &CandidateSet,
        bandit: Option<&BanditGrid>,
        rng: &mut dyn RngCore,
    ) -> Option<usize>;
}

/// Uniform over feasible pixels.
#[derive(Debug, Default, Clone, Copy)]
pub struct UniformSampler;

impl PlacementSampler for UniformSampler {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn propose(
        &self,
        c: &CandidateSet,
        _: Option<&BanditGrid>,
        rng: &mut dyn RngCore,
    ) -> Option<usize> {
        (!c.is_empty()).then(|| rng.random_range(0..c.centers.len()))
    }
}

/// Thompson sampling over bandit cells that contain feasible pixels, then a
/// uniform pixel inside the winning cell. Without a grid it is uniform.
#[derive(Debug, Default, Clone, Copy)]
pub struct ThompsonSampler;

impl PlacementSampler for ThompsonSampler {
    fn name(&self) -> &'static str {
        "thompson"
    }

    fn propose(
        &self,
        c: &CandidateSet,
        bandit: Option<&BanditGrid>,
        rng: &mut dyn RngCore,
    ) -> Option<usize> {
        let Some(grid) = bandit else {
            return UniformSampler.propose(c, None, rng);
        };
        if c.by_cell.is_empty() {
            return None;
        }
        let cells: Vec<usize> = c.by_cell.keys().copied().collect();
        let draws = grid.draw(&cells, rng);
        let best = (0..cells.len())
            .max_by(|&a, &b| draws[a].total_cmp(&draws[b]).then(b.cmp(&a)))
            .expect("non-empty");
        let members = &c.by_cell[&cells[best]];
        Some(members[rng.random_range(0..members.len())])
    }
}

pub fn placement_samplers() -> Registry<dyn PlacementSampler> {
    let mut reg: Registry<dyn PlacementSampler> = Registry::new("placement sampler", "uniform");
    reg.register("uniform", || Box::new(UniformSampler))
        .register("thompson", || Box::new(ThompsonSampler));
    reg
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementParams {
    pub max_attempts: usize,
    /// Ray-trace the composed frame afterwards.
    pub occlusion: bool,
    pub occlusion_eps: f64,
    /// Restrict candidates to |distance − entry range| ≤ tolerance.
    pub range_tolerance: Option<f64>,
    pub sweeps: Option<SweepParams>,
}

impl Default for PlacementParams {
    fn default() -> Self {
        Self {
            max_attempts: 20,
            occlusion: true,
            occlusion_eps: DEFAULT_OCCLUSION_EPS,
            range_tolerance: None,
            sweeps: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    NoFeasiblePixel,
    AttemptsExhausted { footprint: usize, overlap: usize },
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::NoFeasiblePixel => f.write_str("no-feasible-pixel"),
            SkipReason::AttemptsExhausted { footprint, overlap } => {
                write!(
                    f,
                    "attempts-exhausted footprint={footprint} overlap={overlap}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InsertedObject {
    pub entry: usize,
    pub bbox: Box3D,
    /// Object points present after occlusion.
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedEntry {
    pub entry: usize,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlacementReport {
    pub inserted: Vec<InsertedObject>,
    pub skipped: Vec<SkippedEntry>,
    pub removed_inside: usize,
    pub removed_occluded_scene: usize,
    pub removed_occluded_inserted: usize,
}

impl PlacementReport {
    /// One line per inserted or skipped entry; `labels` names entries by index.
    pub fn to_text(&self, labels: &[String]) -> String {
        let name = |i: usize| labels.get(i).map_or("?", String::as_str);
        let mut s = String::new();
        for o in &self.inserted {
            let b = &o.bbox;
            let _ = writeln!(
                s,
                "inserted {} {} {:.3} {:.3} {:.3} {:.3} {:.3} {:.3} {:.4} points={}",
                name(o.entry),
                b.class_label,
                b.center.x,
                b.center.y,
                b.center.z,
                b.size.x,
                b.size.y,
                b.size.z,
                b.yaw,
                o.points
            );
        }
        for k in &self.skipped {
            let _ = writeln!(s, "skipped {} {}", name(k.entry), k.reason);
        }
        let _ = writeln!(
            s,
            "removed inside={} occluded_scene={} occluded_inserted={}",
            self.removed_inside, self.removed_occluded_scene, self.removed_occluded_inserted
        );
        s
    }
}

/// Every pixel whose center lies in the footprint, and every corner pixel,
/// must be feasible.
fn footprint_feasible(b: &Box3D, raster: &FeasibilityRaster) -> bool {
    let corners = b.bev_corners();
    if !corners.iter().all(|c| raster.feasible_at(c[0], c[1])) {
        return false;
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in &corners {
        for a in 0..2 {
            lo[a] = lo[a].min(c[a]);
            hi[a] = hi[a].max(c[a]);
        }
    }
    let (Some(p0), Some(p1)) = (raster.pixel_of(lo[0], lo[1]), raster.pixel_of(hi[0], hi[1]))
    else {
        return false;
    };
    let flat = Box3D {
        size: Vec3::new(b.size.x, b.size.y, f64::INFINITY),
        ..b.clone()
    };
    for iy in p0.1..=p1.1 {
        for ix in p0.0..=p1.0 {
            let (x, y) = raster.pixel_center(ix, iy);
            if flat.contains(&Vec3::new(x, y, b.center.z), 0.0) && !raster.get(ix, iy) {
                return false;
            }
        }
    }
    true
}

/// Inserts entries one by one at sampled feasible spots. Boxes rest on the
/// ground, face `heading + azimuth of the spot`, and may not overlap any
/// existing or earlier inserted box. Scene points inside an inserted box are
/// removed; occlusion runs once after all insertions.
#[allow(clippy::too_many_arguments)]
pub fn place_objects(
    frame: &LidarFrame,
    entries: &[&ObjectBankEntry],
    raster: &FeasibilityRaster,
    ground: &GroundEstimate,
    sensor: &SensorConfig,
    sampler: &dyn PlacementSampler,
    bandit: Option<&BanditGrid>,
    params: &PlacementParams,
    rng: &mut dyn RngCore,
) -> Result<(LidarFrame, PlacementReport)> {
    let mut report = PlacementReport::default();
    let mut feasible = Vec::with_capacity(raster.feasible_count());
    for iy in 0..raster.size() {
        for ix in 0..raster.size() {
            if raster.get(ix, iy) {
                feasible.push(raster.pixel_center(ix, iy));
            }
        }
    }
    let mut boxes = frame.boxes.clone();
    let mut placed: Vec<(usize, Box3D)> = Vec::new();
    for (ei, entry) in entries.iter().enumerate() {
        let centers: Vec<(f64, f64)> = match params.range_tolerance {
            Some(tol) => feasible
                .iter()
                .copied()
                .filter(|&(x, y)| (x.hypot(y) - entry.range_m).abs() <= tol)
                .collect(),
            None => feasible.clone(),
        };
        let candidates = CandidateSet::new(centers, bandit);
        if candidates.is_empty() {
            report.skipped.push(SkippedEntry {
                entry: ei,
                reason: SkipReason::NoFeasiblePixel,
            });
            continue;
        }
        let (mut footprint, mut overlap) = (0, 0);
        let mut done = false;
        for _ in 0..params.max_attempts {
            let Some(ci) = sampler.propose(&candidates, bandit, rng) else {
                break;
            };
            let (x, y) = candidates.centers[ci];
            let size = entry.bbox.size;
            let yaw = normalize_angle(entry.heading() + y.atan2(x));
            let z = ground.height_at(x, y) + size.z / 2.0;
            let b = Box3D::new(Vec3::new(x, y, z), size, yaw, entry.class)?;
            if !footprint_feasible(&b, raster) {
                footprint += 1;
                continue;
            }
            if boxes.iter().any(|o| obb_overlap(o, &b)) {
                overlap += 1;
                continue;
            }
            boxes.push(b.clone());
            placed.push((ei, b));
            done = true;
            break;
        }
        if !done {
            report.skipped.push(SkippedEntry {
                entry: ei,
                reason: SkipReason::AttemptsExhausted { footprint, overlap },
            });
        }
    }

    let scene = &frame.points;
    let kept = scene.filter(|_, p| !placed.iter().any(|(_, b)| b.contains(p, 0.0)));
    report.removed_inside = scene.len() - kept.len();
    let scene_len = kept.len();
    let mut composed = kept;
    let mut spans = Vec::with_capacity(placed.len());
    for (ei, b) in &placed {
        let local = match &params.sweeps {
            Some(sw) => virtual_sweeps(&entries[*ei].points, sw)?,
            None => entries[*ei].points.clone(),
        };
        let world: PointCloud = local.map_positions(|p| b.to_parent(p));
        let start = composed.len();
        composed = if composed.is_empty() {
            world
        } else {
            composed.concat(&world)
        };
        spans.push(start..composed.len());
    }
    if params.occlusion {
        let keep = occlusion_keep_mask(&composed, sensor, params.occlusion_eps);
        report.removed_occluded_scene = keep[..scene_len].iter().filter(|k| !**k).count();
        report.removed_occluded_inserted = keep[scene_len..].iter().filter(|k| !**k).count();
        for ((ei, b), span) in placed.iter().zip(&spans) {
            report.inserted.push(InsertedObject {
                entry: *ei,
                bbox: b.clone(),
                points: keep[span.clone()].iter().filter(|k| **k).count(),
            });
        }
        composed = composed.filter(|i, _| keep[i]);
    } else {
        for ((ei, b), span) in placed.iter().zip(&spans) {
            report.inserted.push(InsertedObject {
                entry: *ei,
                bbox: b.clone(),
                points: span.len(),
            });
        }
    }
    Ok((
        LidarFrame {
            points: composed,
            boxes,
            ego_pose: frame.ego_pose,
        },
        report,
    ))
}
