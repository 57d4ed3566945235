use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use log::{info, warn};
use pgt_core::bank::{
    read_bank, sample_mixed, MixRatio, ObjectBankEntry, PickSource, MIN_ENTRY_POINTS,
};
use pgt_core::eval::class_balance_report;
use pgt_core::io::{write_boxes, write_lidar_bin, BinLayout};
use pgt_core::lidarize::distance_filter;
use pgt_core::scene::{
    estimate_ground, fuse_feasibility, place_objects, placement_samplers, BanditGrid,
    FeasibilityRaster, GroundEstimate, PlacementParams, PlacementReport, SweepParams,
    DEFAULT_BANDIT_CELL, DEFAULT_OCCLUSION_EPS,
};
use pgt_core::{ClassLabel, Error, LidarFrame, SensorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::dataset::{
    classes_of, crop_objects, frame_paths, load_objects, read_frame, FrameFormat,
};

const DEFAULT_MAX_DIST: f64 = 54.0;
const DEFAULT_PER_FRAME: usize = 10;
const DEFAULT_RANGE_TOLERANCE: f64 = 2.5;
const DEFAULT_GROUND_CELL: f64 = 1.0;
const DEFAULT_Z_TOL: f64 = 0.2;
const DEFAULT_SWEEP_DT: f64 = 0.05;

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Directory of `NAME.bin` frames with optional `NAME.boxes` labels.
    #[arg(long)]
    frames: PathBuf,
    /// Object bank directory.
    #[arg(long)]
    bank: PathBuf,
    /// Ground-truth objects (bank or frame directory); defaults to crops of
    /// the input frames.
    #[arg(long)]
    gt_db: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Map raster (PGM with `.meta` sidecar); without it only the estimated
    /// ground is insertable.
    #[arg(long)]
    map: Option<PathBuf>,
    /// GT:PGT sampling ratio.
    #[arg(long)]
    mix: Option<String>,
    /// Drop pool objects farther than this many meters.
    #[arg(long)]
    max_dist: Option<f64>,
    /// Insertion attempts per frame.
    #[arg(long)]
    per_frame: Option<usize>,
    /// Placement sampler: uniform or thompson.
    #[arg(long)]
    sampler: Option<String>,
    /// Bandit state for thompson placement.
    #[arg(long)]
    bandit_state: Option<PathBuf>,
    /// Skip the occlusion pass.
    #[arg(long)]
    no_occlusion: bool,
    /// Candidate spots must lie within this many meters of the entry range;
    /// negative disables the restriction.
    #[arg(long, allow_hyphen_values = true)]
    range_tolerance: Option<f64>,
    /// Placement attempts per object.
    #[arg(long)]
    max_attempts: Option<usize>,
    /// Simulated sweeps per inserted object.
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    sweep_dt: Option<f64>,
    /// Object speed along its heading in m/s.
    #[arg(long)]
    sweep_speed: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    sweep_yaw_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "xyzi")]
    layout: BinLayout,
    #[arg(long, default_value_t = 1.0)]
    intensity_divisor: f64,
}

pub fn parse_mix(text: &str) -> pgt_core::Result<MixRatio> {
    let bad = || Error::Validation(format!("mix ratio `{text}` is not of the form GT:PGT"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let gt = a.trim().parse::<f64>().map_err(|_| bad())?;
    let pgt = b.trim().parse::<f64>().map_err(|_| bad())?;
    MixRatio::new(gt, pgt)
}

struct Settings {
    ratio: MixRatio,
    per_frame: usize,
    sampler: String,
    params: PlacementParams,
    ground_cell: f64,
    z_tol: f64,
    density_threshold: u32,
    seed: u64,
}

struct FrameResult {
    name: String,
    before: Vec<ClassLabel>,
    after: Vec<ClassLabel>,
    inserted: usize,
    skipped: usize,
    note: Option<String>,
}

fn entry_label(side: PickSource, e: &ObjectBankEntry) -> String {
    match side {
        PickSource::Gt => format!("gt:{}", e.source_id),
        PickSource::Pgt => format!("pgt:{}@{}deg/{}m", e.source_id, e.heading_deg, e.range_m),
    }
}

/// Map stand-in when no map raster is given: pixels whose ground cell holds
/// inliers.
fn ground_only_map(ground: &GroundEstimate) -> FeasibilityRaster {
    let mut r = FeasibilityRaster::with_defaults();
    for iy in 0..r.size() {
        for ix in 0..r.size() {
            let (x, y) = r.pixel_center(ix, iy);
            r.set(ix, iy, ground.heights.contains_key(&ground.cell_of(x, y)));
        }
    }
    r
}

#[allow(clippy::too_many_arguments)]
fn augment_frame(
    index: usize,
    path: &Path,
    format: FrameFormat,
    gt: &[ObjectBankEntry],
    pgt: &[ObjectBankEntry],
    map: Option<&FeasibilityRaster>,
    bandit: Option<&BanditGrid>,
    sensor: &SensorConfig,
    s: &Settings,
    out: &Path,
) -> anyhow::Result<FrameResult> {
    let named = read_frame(path, format)?;
    let before: Vec<ClassLabel> = named.frame.boxes.iter().map(|b| b.class_label).collect();
    let mut result = FrameResult {
        name: named.name.clone(),
        before: before.clone(),
        after: before,
        inserted: 0,
        skipped: 0,
        note: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(super::derive_seed(s.seed, index as u64));
    let mut classes = classes_of(gt);
    classes.extend(classes_of(pgt));
    classes.sort();
    classes.dedup();

    let composed: (LidarFrame, Option<PlacementReport>, Vec<String>) =
        match estimate_ground(&named.frame.points, s.ground_cell, s.z_tol) {
            Err(Error::NoGround(msg)) => {
                warn!("{}: no ground ({msg}); frame copied unchanged", named.name);
                result.note = Some("no-ground".into());
                (named.frame.clone(), None, Vec::new())
            }
            Err(e) => return Err(e.into()),
            Ok(ground) if !classes.is_empty() => {
                let base = match map {
                    Some(m) => m.clone(),
                    None => ground_only_map(&ground),
                };
                let raster =
                    fuse_feasibility(&base, &ground, &named.frame.points, s.density_threshold)?;
                let mut chosen: Vec<&ObjectBankEntry> = Vec::with_capacity(s.per_frame);
                let mut labels = Vec::with_capacity(s.per_frame);
                for _ in 0..s.per_frame {
                    let class = classes[rng.random_range(0..classes.len())];
                    let pick = sample_mixed(gt, pgt, class, s.ratio, &mut rng)?;
                    let e = match pick.source {
                        PickSource::Gt => &gt[pick.index],
                        PickSource::Pgt => &pgt[pick.index],
                    };
                    labels.push(entry_label(pick.source, e));
                    chosen.push(e);
                }
                let registry = placement_samplers();
                let sampler = registry.create(&s.sampler)?;
                let (frame, report) = place_objects(
                    &named.frame,
                    &chosen,
                    &raster,
                    &ground,
                    sensor,
                    sampler.as_ref(),
                    bandit,
                    &s.params,
                    &mut rng,
                )?;
                (frame, Some(report), labels)
            }
            Ok(_) => (named.frame.clone(), None, Vec::new()),
        };
    let (frame, report, labels) = composed;

    let layout = if frame.points.time_offset().is_some() {
        BinLayout::Xyzit
    } else {
        BinLayout::Xyzi
    };
    let mut points = frame.points.clone().without_ring();
    if points.intensity().is_none() {
        let n = points.len();
        points = points.with_intensity(vec![0.0; n])?;
    }
    write_lidar_bin(&points, layout, &out.join(format!("{}.bin", named.name)))?;
    write_boxes(&frame.boxes, &out.join(format!("{}.boxes", named.name)))?;
    let mut text = String::new();
    match &report {
        Some(r) => {
            text.push_str(&r.to_text(&labels));
            result.inserted = r.inserted.len();
            result.skipped = r.skipped.len();
        }
        None => {
            let _ = writeln!(
                text,
                "unchanged {}",
                result.note.as_deref().unwrap_or("empty-pool")
            );
        }
    }
    super::emit_file(&text, &out.join(format!("{}.report", named.name)))?;
    result.after = frame.boxes.iter().map(|b| b.class_label).collect();
    info!(
        "{}: inserted {} skipped {}",
        named.name, result.inserted, result.skipped
    );
    Ok(result)
}

pub fn run(args: AugmentArgs, cfg: &PipelineConfig) -> anyhow::Result<()> {
    let mut inputs = vec![args.frames.as_path(), args.bank.as_path()];
    inputs.extend(args.gt_db.as_deref());
    inputs.extend(args.map.as_deref());
    inputs.extend(args.bandit_state.as_deref());
    super::require_paths(inputs)?;
    let ac = &cfg.augment;
    let sensor = cfg.sensor()?;
    let format = FrameFormat {
        layout: args.layout,
        intensity_divisor: args.intensity_divisor,
    };

    let mix_text = args
        .mix
        .clone()
        .or_else(|| ac.mix.clone())
        .unwrap_or_else(|| "1:1".into());
    let ratio = parse_mix(&mix_text)?;
    let max_dist = args.max_dist.or(ac.max_dist).unwrap_or(DEFAULT_MAX_DIST);
    let sampler = args
        .sampler
        .clone()
        .or_else(|| ac.sampler.clone())
        .unwrap_or_else(|| placement_samplers().default_name().to_string());
    placement_samplers().create(&sampler)?;
    let tol = args
        .range_tolerance
        .or(ac.range_tolerance)
        .unwrap_or(DEFAULT_RANGE_TOLERANCE);
    let sweeps = match args.sweeps.or(ac.sweeps) {
        Some(k) => Some(SweepParams {
            speed: args.sweep_speed.or(ac.sweep_speed).unwrap_or(0.0),
            yaw_rate: args.sweep_yaw_rate.or(ac.sweep_yaw_rate).unwrap_or(0.0),
            sweeps: k,
            dt: args.sweep_dt.or(ac.sweep_dt).unwrap_or(DEFAULT_SWEEP_DT),
        }),
        None => None,
    };
    let settings = Settings {
        ratio,
        per_frame: args.per_frame.or(ac.per_frame).unwrap_or(DEFAULT_PER_FRAME),
        sampler: sampler.clone(),
        params: PlacementParams {
            max_attempts: args.max_attempts.or(ac.max_attempts).unwrap_or(20),
            occlusion: !args.no_occlusion && ac.occlusion.unwrap_or(true),
            occlusion_eps: DEFAULT_OCCLUSION_EPS,
            range_tolerance: (tol >= 0.0).then_some(tol),
            sweeps,
        },
        ground_cell: ac.ground_cell.unwrap_or(DEFAULT_GROUND_CELL),
        z_tol: ac.z_tol.unwrap_or(DEFAULT_Z_TOL),
        density_threshold: ac.density_threshold.unwrap_or(1),
        seed: args.seed.or(cfg.seed).unwrap_or(0),
    };

    let map_path = args
        .map
        .clone()
        .or_else(|| ac.map.as_ref().map(PathBuf::from));
    let map = map_path
        .as_deref()
        .map(FeasibilityRaster::read)
        .transpose()?;
    let bandit = match &args.bandit_state {
        Some(p) => Some(BanditGrid::read(p)?),
        None if sampler == "thompson" => {
            let extent = map.clone().unwrap_or_else(FeasibilityRaster::with_defaults);
            Some(BanditGrid::covering(&extent, DEFAULT_BANDIT_CELL)?)
        }
        None => None,
    };

    let paths = frame_paths(&args.frames)?;
    let pgt_all = read_bank(&args.bank)?.entries;
    let gt_all = match &args.gt_db {
        Some(p) => load_objects(p, format, MIN_ENTRY_POINTS)?,
        None => {
            let mut v = Vec::new();
            for p in &paths {
                v.extend(crop_objects(&read_frame(p, format)?, MIN_ENTRY_POINTS)?);
            }
            v
        }
    };
    let (gt, gt_removed) = distance_filter(gt_all, max_dist)?;
    let (pgt, pgt_removed) = distance_filter(pgt_all, max_dist)?;

    std::fs::create_dir_all(&args.out).map_err(|e| Error::Io {
        path: args.out.clone(),
        source: e,
    })?;
    let results: Vec<FrameResult> = paths
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            augment_frame(
                i,
                p,
                format,
                &gt,
                &pgt,
                map.as_ref(),
                bandit.as_ref(),
                &sensor,
                &settings,
                &args.out,
            )
            .with_context(|| format!("augmenting {}", p.display()))
        })
        .collect::<anyhow::Result<_>>()?;

    let before = class_balance_report(results.iter().flat_map(|r| r.before.iter().copied()));
    let after = class_balance_report(results.iter().flat_map(|r| r.after.iter().copied()));
    let mut text = String::new();
    let _ = writeln!(text, "frames {}", results.len());
    let _ = writeln!(
        text,
        "mix {mix_text} gt_probability {}",
        ratio.gt_probability()
    );
    let _ = writeln!(text, "max_dist {max_dist}");
    let _ = writeln!(
        text,
        "map {}",
        if map_path.is_some() {
            "raster"
        } else {
            "ground-only"
        }
    );
    let _ = writeln!(text, "sampler {sampler}");
    let _ = writeln!(
        text,
        "pool gt {} pgt {} removed_far gt {gt_removed} pgt {pgt_removed}",
        gt.len(),
        pgt.len()
    );
    for r in &results {
        let _ = writeln!(
            text,
            "frame {} inserted {} skipped {}{}",
            r.name,
            r.inserted,
            r.skipped,
            r.note.as_ref().map(|n| format!(" {n}")).unwrap_or_default()
        );
    }
    let _ = writeln!(
        text,
        "inserted {} skipped {}",
        results.iter().map(|r| r.inserted).sum::<usize>(),
        results.iter().map(|r| r.skipped).sum::<usize>()
    );
    text.push_str("balance before\n");
    text.push_str(&before.to_text());
    text.push_str("balance after\n");
    text.push_str(&after.to_text());
    super::emit(&text, Some(&args.out.join("augment_report")))?;
    Ok(())
}
