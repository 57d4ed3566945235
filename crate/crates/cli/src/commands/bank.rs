use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use pgt_core::bank::{
    default_headings_deg, default_ranges_m, fit_to_size, generate_bank, pca_align, write_bank,
    BankParams, BankSource, ObjectBankEntry, SizeJitterConfig, MIN_ENTRY_POINTS,
};
use pgt_core::intensity::{
    fit_calibration, intensity_estimators, CalibrationParams, CalibrationSample,
    IntensityCalibration,
};
use pgt_core::io::{read_ply_rgb, BinLayout};
use pgt_core::{ClassLabel, Error};

use crate::config::PipelineConfig;
use crate::dataset::{load_objects, FrameFormat};

#[derive(Debug, Args)]
pub struct BuildBankArgs {
    /// Source list: `class source_id front_flag path.ply` per line, paths
    /// relative to the list.
    #[arg(long)]
    sources: PathBuf,
    /// Real objects for intensity calibration: a bank directory or a frame
    /// directory with `.boxes` labels.
    #[arg(
        long,
        conflicts_with = "calibration",
        required_unless_present = "calibration"
    )]
    real: Option<PathBuf>,
    /// Previously fitted calibration file.
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Output bank directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Entries with fewer returns are discarded.
    #[arg(long)]
    min_points: Option<usize>,
    /// Comma-separated headings in degrees.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    headings: Option<Vec<f64>>,
    /// Comma-separated ranges in meters.
    #[arg(long, value_delimiter = ',')]
    ranges: Option<Vec<f64>>,
    /// Relative size jitter standard deviation.
    #[arg(long)]
    sigma: Option<f64>,
    /// Jitter clip in standard deviations.
    #[arg(long)]
    clip: Option<f64>,
    /// Intensity estimator: knn-hist or knn.
    #[arg(long)]
    estimator: Option<String>,
    /// Neighbors for intensity estimation.
    #[arg(long)]
    k: Option<usize>,
    /// Target histogram bins.
    #[arg(long)]
    bins: Option<usize>,
    /// Skip PCA alignment of sources that are already canonical.
    #[arg(long)]
    no_align: bool,
    /// Point layout of real frame binaries.
    #[arg(long, default_value = "xyzi")]
    layout: BinLayout,
    /// Divides stored intensities (255 for 8-bit sensors).
    #[arg(long, default_value_t = 1.0)]
    intensity_divisor: f64,
}

#[derive(Debug)]
struct SourceLine {
    class: ClassLabel,
    source_id: String,
    front_flag: bool,
    path: PathBuf,
}

fn parse_flag(token: &str) -> Option<bool> {
    match token {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    }
}

fn parse_sources(text: &str, base: &Path) -> pgt_core::Result<Vec<SourceLine>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |m: &str| Error::Format {
            offset: None,
            message: format!("source list line {}: {m}", i + 1),
        };
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 4 {
            return Err(bad("expected `class source_id front_flag path`"));
        }
        let class = t[0]
            .parse::<ClassLabel>()
            .map_err(|_| bad("unknown class"))?;
        let front_flag = parse_flag(t[2]).ok_or_else(|| bad("front_flag must be 0/1"))?;
        out.push(SourceLine {
            class,
            source_id: t[1].to_string(),
            front_flag,
            path: base.join(t[3]),
        });
    }
    Ok(out)
}

/// Pairs every real object with a source of its class, round robin, with the
/// source scaled to the real box.
fn calibration_samples(
    sources: &[BankSource],
    real: &[ObjectBankEntry],
) -> pgt_core::Result<Vec<CalibrationSample>> {
    let mut by_class: BTreeMap<ClassLabel, Vec<&BankSource>> = BTreeMap::new();
    for s in sources {
        by_class.entry(s.class).or_default().push(s);
    }
    let mut samples = Vec::new();
    for (class, srcs) in &by_class {
        let reals: Vec<&ObjectBankEntry> = real.iter().filter(|e| e.class == *class).collect();
        if reals.is_empty() {
            return Err(Error::Validation(format!(
                "no real {class} objects available for intensity calibration"
            )));
        }
        for (i, r) in reals.iter().enumerate() {
            let src = srcs[i % srcs.len()];
            samples.push(CalibrationSample {
                class: *class,
                rgb_cloud: fit_to_size(src, &r.bbox.size)?,
                intensity_cloud: r.points.clone(),
            });
        }
    }
    Ok(samples)
}

pub fn run(args: BuildBankArgs, cfg: &PipelineConfig) -> anyhow::Result<()> {
    let mut inputs = vec![args.sources.as_path()];
    inputs.extend(args.real.as_deref());
    inputs.extend(args.calibration.as_deref());
    super::require_paths(inputs)?;

    let bc = &cfg.bank;
    let sensor = cfg.sensor()?;
    let align = !args.no_align && bc.align.unwrap_or(true);
    let text = std::fs::read_to_string(&args.sources).map_err(|e| Error::Io {
        path: args.sources.clone(),
        source: e,
    })?;
    let base = args.sources.parent().unwrap_or(Path::new("."));
    let mut sources = Vec::new();
    for line in parse_sources(&text, base)? {
        let cloud = read_ply_rgb(&line.path)?;
        let points = if align {
            pca_align(&cloud)
                .with_context(|| format!("aligning source {}", line.source_id))?
                .0
        } else {
            cloud
        };
        sources.push(BankSource {
            class: line.class,
            source_id: line.source_id,
            points,
            front_flag: line.front_flag,
        });
    }
    anyhow::ensure!(
        !sources.is_empty(),
        "source list {} is empty",
        args.sources.display()
    );

    let cal_params = CalibrationParams {
        k: args.k.or(bc.k).unwrap_or(CalibrationParams::default().k),
        bins: args
            .bins
            .or(bc.bins)
            .unwrap_or(CalibrationParams::default().bins),
        patches: bc.patches.unwrap_or(CalibrationParams::default().patches),
        ..Default::default()
    };
    let calibration = match (&args.calibration, &args.real) {
        (Some(path), _) => IntensityCalibration::read(path)?,
        (None, Some(real_path)) => {
            let format = FrameFormat {
                layout: args.layout,
                intensity_divisor: args.intensity_divisor,
            };
            let real = load_objects(real_path, format, MIN_ENTRY_POINTS)?;
            let samples = calibration_samples(&sources, &real)?;
            fit_calibration(&samples, &cal_params).context("fitting intensity calibration")?
        }
        (None, None) => unreachable!("clap requires --real or --calibration"),
    };

    let defaults = SizeJitterConfig::default();
    let params = BankParams {
        headings_deg: args
            .headings
            .or_else(|| bc.headings.clone())
            .unwrap_or_else(default_headings_deg),
        ranges_m: args
            .ranges
            .or_else(|| bc.ranges.clone())
            .unwrap_or_else(default_ranges_m),
        jitter: SizeJitterConfig {
            sigma: args.sigma.or(bc.sigma).unwrap_or(defaults.sigma),
            clip: args.clip.or(bc.clip).unwrap_or(defaults.clip),
            ..defaults
        },
        min_points: args
            .min_points
            .or(bc.min_points)
            .unwrap_or(MIN_ENTRY_POINTS),
        seed: args.seed.or(cfg.seed).unwrap_or(0),
    };
    let estimators = intensity_estimators();
    let estimator = match args.estimator.as_deref().or(bc.estimator.as_deref()) {
        Some(name) => estimators.create(name)?,
        None => estimators.create_default(),
    };
    let (bank, report) =
        generate_bank(&sources, &sensor, &params, &calibration, estimator.as_ref())?;
    write_bank(&args.out, &bank, Some(&calibration))?;
    println!("headings {}", params.headings_deg.len());
    println!("ranges {}", params.ranges_m.len());
    println!("min_points {}", params.min_points);
    println!(
        "attempted {} kept {} discarded_sparse {}",
        report.attempted, report.kept, report.discarded_sparse
    );
    println!("bank -> {}", args.out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_list_parsing() {
        let text = "# comment\ncar c0 1 objs/c0.ply\n\npedestrian p0 false p.ply # trailing\n";
        let v = parse_sources(text, Path::new("/data")).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].class, ClassLabel::Car);
        assert_eq!(v[0].path, Path::new("/data/objs/c0.ply"));
        assert!(!v[1].front_flag);
        let err = parse_sources("car c0 yes a.ply\n", Path::new(".")).unwrap_err();
        assert!(err.is_format());
        assert!(parse_sources("boat c0 1 a.ply\n", Path::new(".")).is_err());
    }
}
