//! `pam bench`: time one reconstruction setup and report the analytic
//! operation count beside the measured median wall-clock.
//!
//! The benchmark synthesizes its own noiseless frame (defaults: P4-1 array,
//! one Vokurka cloud, seed 0) so results do not depend on external files;
//! a config and --seed/--array override the synthesis.

use crate::commands::simulate::protocol_from_config;
use crate::config::Config;
use crate::error::{CliError, Result};
use clap::Args;
use pam_core::arrays::ArrayModel;
use pam_core::beamform::{BeamformParams, Method};
use pam_core::bench::{time_reconstruct, FlopModel};
use pam_core::build_grid;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Beamformer: tea, rcb, eisrcb, daxrcb, or rlpb.
    #[arg(long, value_name = "M")]
    pub method: String,
    /// Grid decimation (must divide 512); defaults from the config.
    #[arg(long = "grid-decim", value_name = "D")]
    pub grid_decim: Option<u32>,
    /// Worker threads; defaults from the config ([bench] threads).
    #[arg(long, value_name = "T")]
    pub threads: Option<usize>,
    /// Timing repeats (median is reported); defaults from the config.
    #[arg(long, value_name = "R")]
    pub repeats: Option<usize>,
    /// Settings file for the synthesized frame and solver defaults.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Frame seed; overrides the config.
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
    /// Array model for the synthesized frame; overrides the config.
    #[arg(long, value_name = "A")]
    pub array: Option<String>,
    /// Assumed Newton iterations per robust Capon solve (operation model).
    #[arg(long = "rcb-iters", default_value_t = 20, value_name = "I")]
    pub rcb_iters: usize,
    /// Output CSV file.
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,
}

pub fn run(args: &BenchArgs) -> Result<()> {
    let method: Method = args
        .method
        .parse()
        .map_err(|e: pam_core::Error| CliError::Config(e.to_string()))?;
    let mut cfg = match &args.config {
        Some(path) => crate::config::load(path)?,
        None => Config::default(),
    };
    if let Some(name) = &args.array {
        cfg.array = name
            .parse::<ArrayModel>()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let seed = args.seed.unwrap_or(cfg.seed);
    let threads = args.threads.unwrap_or(cfg.bench_threads);
    let repeats = args.repeats.unwrap_or(cfg.bench_repeats);
    if repeats < 5 {
        return Err(CliError::Config(format!(
            "benchmark medians need at least 5 repeats, got {repeats}"
        )));
    }
    if threads == 0 {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }

    let protocol = protocol_from_config(&cfg, seed)?;
    let decim = args.grid_decim.unwrap_or(cfg.grid_decim);
    let grid = build_grid(cfg.array, decim).map_err(|e| CliError::Config(e.to_string()))?;

    let mut params = BeamformParams::for_sources(cfg.clouds);
    if let Some(e) = cfg.eps {
        params.eps = e;
    }
    if let Some(d) = cfg.delta {
        params.delta = d;
    }
    if let Some(t) = cfg.tau {
        params.tau = t;
    }
    params
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let (frame, _) = protocol.acquisition(0)?;
    let (report, _map) = time_reconstruct(&frame, &grid, method, &params, threads, repeats)?;

    let flops = FlopModel {
        method,
        n_elements: frame.n_channels(),
        n_samples: frame.n_samples(),
        n_pixels: grid.len(),
        rcb_iters: args.rcb_iters,
        rlpb_snapshots: params.rlpb_max_snapshots.min(frame.n_samples()),
    }
    .flops();

    let csv = format!(
        "method,pixels,threads,repeats,wall_ms,flops\n{method},{},{},{},{},{flops}\n",
        report.pixels, report.threads, report.repeats, report.wall_ms
    );
    std::fs::write(&args.out, csv)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", args.out.display())))?;
    println!(
        "{method}: median {:.3} ms over {} repeat(s) on {} pixel(s), {} worker(s); \
         model {flops} flops; wrote {}",
        report.wall_ms,
        report.repeats,
        report.pixels,
        report.threads,
        args.out.display()
    );
    Ok(())
}
