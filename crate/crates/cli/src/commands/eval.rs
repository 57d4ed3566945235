use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use pgt_core::bank::{ObjectBankEntry, MIN_ENTRY_POINTS};
use pgt_core::eval::{
    class_balance_report, featurize, frechet_distance_regularized, mean_group_distance,
    GaussianSummary, FEATURE_DIM,
};
use pgt_core::intensity::{DEFAULT_LAMBDA, DEFAULT_PATCHES};
use pgt_core::io::BinLayout;
use pgt_core::ClassLabel;
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::dataset::{classes_of, load_objects, FrameFormat};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// First object set: bank directory or labeled frame directory.
    #[arg(long)]
    a: PathBuf,
    /// Second object set.
    #[arg(long)]
    b: PathBuf,
    /// Weight of the group intensity distance.
    #[arg(long)]
    lambda: Option<f64>,
    /// Patches per object for the group intensity distance.
    #[arg(long)]
    patches: Option<usize>,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "xyzi")]
    layout: BinLayout,
    #[arg(long, default_value_t = 1.0)]
    intensity_divisor: f64,
}

fn summarize(entries: &[&ObjectBankEntry]) -> pgt_core::Result<GaussianSummary> {
    let feats = entries
        .par_iter()
        .map(|e| featurize(&e.points, &e.bbox))
        .collect::<pgt_core::Result<Vec<_>>>()?;
    GaussianSummary::from_samples(feats.iter().map(|f| f.as_slice()), FEATURE_DIM)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6}"))
}

pub fn report(
    a: &[ObjectBankEntry],
    b: &[ObjectBankEntry],
    patches: usize,
    lambda: f64,
) -> pgt_core::Result<String> {
    let mut classes: Vec<ClassLabel> = classes_of(a);
    classes.extend(classes_of(b));
    classes.sort();
    classes.dedup();
    let mut text = String::new();
    let _ = writeln!(text, "objects a {} b {}", a.len(), b.len());
    let _ = writeln!(text, "lambda {lambda} patches {patches}");
    text.push_str("class frechet group_intensity\n");
    let mut group_sum = 0.0;
    let mut group_n = 0usize;
    for class in classes {
        let ea: Vec<&ObjectBankEntry> = a.iter().filter(|e| e.class == class).collect();
        let eb: Vec<&ObjectBankEntry> = b.iter().filter(|e| e.class == class).collect();
        let (fd, gd) = if ea.is_empty() || eb.is_empty() {
            (None, None)
        } else {
            let fd = frechet_distance_regularized(&summarize(&ea)?, &summarize(&eb)?)?;
            let gd = mean_group_distance(&ea, &eb, patches, lambda)?;
            (Some(fd), gd)
        };
        if let Some(g) = gd {
            group_sum += g;
            group_n += 1;
        }
        let _ = writeln!(text, "{class} {} {}", fmt_opt(fd), fmt_opt(gd));
    }
    let _ = writeln!(
        text,
        "mean_group_intensity {}",
        fmt_opt((group_n > 0).then(|| group_sum / group_n as f64))
    );
    let ba = class_balance_report(a.iter().map(|e| e.class));
    let bb = class_balance_report(b.iter().map(|e| e.class));
    text.push_str("balance a\n");
    text.push_str(&ba.to_text());
    text.push_str("balance b\n");
    text.push_str(&bb.to_text());
    text.push_str("delta b-a\n");
    for (c, d) in ba.delta(&bb) {
        let _ = writeln!(text, "{c} {d:+}");
    }
    Ok(text)
}

pub fn run(args: EvalArgs, cfg: &PipelineConfig) -> anyhow::Result<()> {
    super::require_paths([args.a.as_path(), args.b.as_path()])?;
    let lambda = args.lambda.or(cfg.eval.lambda).unwrap_or(DEFAULT_LAMBDA);
    let patches = args.patches.or(cfg.eval.patches).unwrap_or(DEFAULT_PATCHES);
    let format = FrameFormat {
        layout: args.layout,
        intensity_divisor: args.intensity_divisor,
    };
    let a = load_objects(&args.a, format, MIN_ENTRY_POINTS)?;
    let b = load_objects(&args.b, format, MIN_ENTRY_POINTS)?;
    let text = report(&a, &b, patches, lambda)?;
    super::emit(&text, args.out.as_deref())
}
