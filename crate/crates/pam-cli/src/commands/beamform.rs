//! `pam beamform`: reconstruct one energy map from one RF file.

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::formats::{read_rf, render_map, write_map};
use clap::Args;
use pam_core::beamform::{reconstruct, BeamformParams, EnergyMap, Method};
use pam_core::build_grid;
use pam_core::cavsim::RFFrame;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct BeamformArgs {
    /// Input RF file.
    #[arg(long = "in", value_name = "RF")]
    pub input: PathBuf,
    /// Beamformer: tea, rcb, eisrcb, daxrcb, or rlpb.
    #[arg(long, value_name = "M")]
    pub method: String,
    /// Grid decimation (must divide 512); defaults from the config.
    #[arg(long = "grid-decim", value_name = "D")]
    pub grid_decim: Option<u32>,
    /// Settings file ([beamform] section supplies eps/delta/tau defaults).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Steering uncertainty ball size (RCB family).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Eigen-subspace threshold in (0, 1] (EISRCB).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Weight-norm penalty (RLPB).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Expected source count; tunes eps when it is not set explicitly.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub sources: u8,
    /// Worker threads for the reconstruction (default: rayon's choice).
    #[arg(long, value_name = "T")]
    pub threads: Option<usize>,
    /// Output map file.
    #[arg(long, value_name = "MAP")]
    pub out: PathBuf,
    /// Also render the map as <out>.pgm.
    #[arg(long)]
    pub render: bool,
    /// Rendering dynamic range, dB.
    #[arg(long = "dyn-range", default_value_t = 40.0, value_name = "DB")]
    pub dyn_range: f64,
}

/// Resolves solver parameters: source-count defaults, then config values,
/// then explicit flags.
pub fn resolve_params(
    sources: u8,
    cfg: &Config,
    eps: Option<f64>,
    delta: Option<f64>,
    tau: Option<f64>,
) -> Result<BeamformParams> {
    let mut params = BeamformParams::for_sources(sources);
    if let Some(e) = eps.or(cfg.eps) {
        params.eps = e;
    }
    if let Some(d) = delta.or(cfg.delta) {
        params.delta = d;
    }
    if let Some(t) = tau.or(cfg.tau) {
        params.tau = t;
    }
    params
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(params)
}

/// Runs `reconstruct`, on a dedicated pool when a worker count is given.
/// The map is bitwise independent of the worker count.
pub fn reconstruct_with_threads(
    rf: &RFFrame,
    grid: &pam_core::ImagingGrid,
    method: Method,
    params: &BeamformParams,
    threads: Option<usize>,
) -> Result<EnergyMap> {
    match threads {
        None => Ok(reconstruct(rf, grid, method, params)?),
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Runtime(format!("cannot build a {t}-worker pool: {e}")))?;
            Ok(pool.install(|| reconstruct(rf, grid, method, params))?)
        }
    }
}

pub fn run(args: &BeamformArgs) -> Result<()> {
    let method: Method = args
        .method
        .parse()
        .map_err(|e: pam_core::Error| CliError::Config(e.to_string()))?;
    let cfg = match &args.config {
        Some(path) => crate::config::load(path)?,
        None => Config::default(),
    };
    let rf = read_rf(&args.input)?;
    let decim = args.grid_decim.unwrap_or(cfg.grid_decim);
    let grid = build_grid(rf.model, decim).map_err(|e| CliError::Config(e.to_string()))?;
    let params = resolve_params(args.sources, &cfg, args.eps, args.delta, args.tau)?;

    let map = reconstruct_with_threads(&rf, &grid, method, &params, args.threads)?;
    write_map(&map, &args.out)?;
    if args.render {
        render_map(&map, args.dyn_range, &args.out.with_extension("pgm"))?;
    }

    println!(
        "wrote {method} map ({} x {} pixels, peak {:.6e}) to {}",
        map.nx(),
        map.nz(),
        map.max_value(),
        args.out.display()
    );
    Ok(())
}
