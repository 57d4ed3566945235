use std::path::PathBuf;

use clap::Args;
use pgt_core::io::write_ply;
use pgt_core::radiance::{color_decoders, extract_colored_cloud, read_views, ShVoxelGrid};

use crate::config::PipelineConfig;

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Voxel grid (SHVG binary).
    #[arg(long)]
    grid: PathBuf,
    /// Camera views, one per line.
    #[arg(long)]
    views: PathBuf,
    /// Output PLY.
    #[arg(long)]
    out: PathBuf,
    /// Ray-march step in meters (default: half a voxel).
    #[arg(long)]
    step: Option<f64>,
    /// Minimum voxel density that counts as occupied.
    #[arg(long)]
    density_min: Option<f64>,
    /// Color decoder: clamp, offset-clamp or sigmoid.
    #[arg(long)]
    decode: Option<String>,
}

pub fn run(args: ExtractArgs, cfg: &PipelineConfig) -> anyhow::Result<()> {
    super::require_paths([args.grid.as_path(), args.views.as_path()])?;
    let density_min = args.density_min.or(cfg.extract.density_min).unwrap_or(0.0);
    let decoders = color_decoders();
    let decoder = match args.decode.as_deref().or(cfg.extract.decode.as_deref()) {
        Some(name) => decoders.create(name)?,
        None => decoders.create_default(),
    };
    let grid = ShVoxelGrid::read(&args.grid)?;
    let views = read_views(&args.views)?;
    let step = args
        .step
        .or(cfg.extract.step)
        .unwrap_or(grid.voxel_size() / 2.0);
    let cloud = extract_colored_cloud(&grid, &views, step, density_min, decoder.as_ref())?;
    write_ply(&cloud, &args.out)?;
    println!(
        "extracted {} points from {} views -> {}",
        cloud.len(),
        views.len(),
        args.out.display()
    );
    Ok(())
}
