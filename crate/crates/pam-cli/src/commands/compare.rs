//! `pam compare`: reconstruct a set of RF files with several methods and
//! tabulate per-method focal area and ISNR statistics.

use crate::commands::metrics::expand_glob;
use crate::error::{CliError, Result};
use crate::formats::read_rf;
use clap::Args;
use pam_core::beamform::{reconstruct, BeamformParams, Method};
use pam_core::build_grid;
use pam_core::metrics::map_stats;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Glob of RF files.
    #[arg(long, value_name = "GLOB")]
    pub rf: String,
    /// Comma-separated method list, e.g. tea,rcb,eisrcb.
    #[arg(long, value_name = "LIST")]
    pub methods: String,
    /// Grid decimation (must divide 512).
    #[arg(long = "grid-decim", value_name = "D", default_value_t = 4)]
    pub grid_decim: u32,
    /// Output CSV file.
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,
}

/// Parses "tea,rcb,..." into methods, rejecting duplicates.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for part in list.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let m: Method = part
            .parse()
            .map_err(|e: pam_core::Error| CliError::Config(e.to_string()))?;
        if methods.contains(&m) {
            return Err(CliError::Config(format!("method '{m}' listed twice")));
        }
        methods.push(m);
    }
    if methods.is_empty() {
        return Err(CliError::Config("--methods names no methods".into()));
    }
    Ok(methods)
}

/// Mean and sample standard deviation (n - 1); one sample has zero spread.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn run(args: &CompareArgs) -> Result<()> {
    let methods = parse_methods(&args.methods)?;
    let paths = expand_glob(&args.rf)?;
    let params = BeamformParams::default();

    let mut a3db: Vec<Vec<f64>> = vec![Vec::new(); methods.len()];
    let mut isnr: Vec<Vec<f64>> = vec![Vec::new(); methods.len()];
    for path in &paths {
        let rf = read_rf(path)?;
        let grid = build_grid(rf.model, args.grid_decim)
            .map_err(|e| CliError::Config(e.to_string()))?;
        for (mi, &method) in methods.iter().enumerate() {
            let map = reconstruct(&rf, &grid, method, &params)?;
            let stats = map_stats(&map, None)?;
            a3db[mi].push(stats.a3db_area);
            isnr[mi].push(stats.isnr_db);
        }
    }

    let mut csv =
        String::from("method,runs,a3db_mean_mm2,a3db_std_mm2,isnr_mean_db,isnr_std_db\n");
    for (mi, &method) in methods.iter().enumerate() {
        let (am, astd) = mean_std(&a3db[mi]);
        let (im, istd) = mean_std(&isnr[mi]);
        writeln!(csv, "{method},{},{am},{astd},{im},{istd}", a3db[mi].len())
            .expect("writing to a String cannot fail");
    }
    std::fs::write(&args.out, csv)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", args.out.display())))?;
    println!(
        "compared {} method(s) over {} frame(s); wrote {}",
        methods.len(),
        paths.len(),
        args.out.display()
    );
    Ok(())
}
