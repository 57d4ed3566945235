//! `pgt`: batch front end for pseudo-LiDAR object generation and scene
//! composition.
//!
//! Exit codes: 0 success, 2 unreadable or malformed input, 3 any other
//! failure (validation, degenerate geometry, bad arguments).

mod commands;
mod config;
mod dataset;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::PipelineConfig;

#[derive(Debug, Parser)]
#[command(
    name = "pgt",
    version,
    about = "Pseudo ground-truth LiDAR augmentation toolkit"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract a colored point cloud from a spherical-harmonic voxel grid.
    Extract(commands::extract::ExtractArgs),
    /// Lidarize dense objects into an object bank.
    BuildBank(commands::bank::BuildBankArgs),
    /// Paste bank and ground-truth objects into LiDAR frames.
    Augment(commands::augment::AugmentArgs),
    /// Compare two object sets.
    Eval(commands::eval::EvalArgs),
}

const EXIT_FORMAT: u8 = 2;
const EXIT_FAILURE: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<pgt_core::Error>() {
            return if e.is_format() {
                EXIT_FORMAT
            } else {
                EXIT_FAILURE
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_FORMAT;
        }
    }
    EXIT_FAILURE
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = PipelineConfig::load(cli.config.as_deref())?;
    if let Some(n) = cli.jobs.or(cfg.jobs) {
        anyhow::ensure!(n > 0, "--jobs must be positive");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match cli.command {
        Command::Extract(a) => commands::extract::run(a, &cfg),
        Command::BuildBank(a) => commands::bank::run(a, &cfg),
        Command::Augment(a) => commands::augment::run(a, &cfg),
        Command::Eval(a) => commands::eval::run(a, &cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PGT_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_FAILURE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let fmt = anyhow::Error::new(pgt_core::Error::Format {
            offset: Some(4),
            message: "bad magic".into(),
        });
        assert_eq!(exit_code(&fmt), EXIT_FORMAT);
        let io = anyhow::Error::new(std::io::Error::other("gone")).context("reading x");
        assert_eq!(exit_code(&io), EXIT_FORMAT);
        let val = anyhow::Error::new(pgt_core::Error::Validation("k".into())).context("fitting");
        assert_eq!(exit_code(&val), EXIT_FAILURE);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), EXIT_FAILURE);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
