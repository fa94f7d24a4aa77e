//! `pam metrics`: score a set of energy maps and tabulate the results.
//!
//! Maps are grouped by filename stem with a trailing method suffix removed
//! ("acq0003-eisrcb.map" and "acq0003-tea.map" land in group "acq0003"), so
//! one acquisition reconstructed by several methods compares like for like.
//! Centroid deviations are reported against the group's reference method:
//! the first of eisrcb, rcb, daxrcb, rlpb, tea present in the group.

use crate::error::{CliError, Result};
use crate::formats::read_map;
use clap::Args;
use ndarray::Array2;
use pam_core::beamform::{EnergyMap, Method};
use pam_core::metrics::{
    axial_deviation_wl, lateral_deviation_wl, map_stats, union_mask,
};
use pam_core::{build_array, build_grid, ArrayModel};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Deviation-reference preference order.
const REFERENCE_ORDER: [Method; 5] = [
    Method::Eisrcb,
    Method::Rcb,
    Method::DaxRcb,
    Method::Rlpb,
    Method::Tea,
];

/// Wavelength fallback when no array is identified, m.
const DEFAULT_WAVELENGTH: f64 = 1.0e-3;

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Glob of map files to score.
    #[arg(long, value_name = "GLOB")]
    pub maps: String,
    /// Evaluate ISNR over the union of the group's noise-floor regions.
    #[arg(long)]
    pub union: bool,
    /// Express deviations in wavelengths of the array the map grid belongs
    /// to (1540 m/s at the array center frequency) instead of 1 mm units.
    #[arg(long = "wavelength-from-array")]
    pub wavelength_from_array: bool,
    /// Output CSV file.
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,
}

/// Expands a glob into a sorted path list; empty matches are config errors.
pub fn expand_glob(pattern: &str) -> Result<Vec<PathBuf>> {
    let walk = glob::glob(pattern)
        .map_err(|e| CliError::Config(format!("bad glob '{pattern}': {e}")))?;
    let mut paths = Vec::new();
    for entry in walk {
        paths.push(entry.map_err(|e| CliError::Runtime(format!("cannot read glob entry: {e}")))?);
    }
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Config(format!("no files match '{pattern}'")));
    }
    Ok(paths)
}

/// Group key: filename stem minus a trailing "-<method>" or "_<method>".
fn group_key(path: &Path, method: Method) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tag = method.to_string();
    for sep in ['-', '_'] {
        if let Some(prefix) = stem.strip_suffix(&format!("{sep}{tag}")) {
            if !prefix.is_empty() {
                return prefix.to_string();
            }
        }
    }
    stem
}

/// The wavelength for deviation units: matched off the grid aspect when
/// requested (each array model has a distinct native dz/dx), else 1 mm.
fn wavelength_for(map: &EnergyMap, from_array: bool) -> Result<f64> {
    if !from_array {
        return Ok(DEFAULT_WAVELENGTH);
    }
    let aspect = map.grid.dz / map.grid.dx;
    for model in ArrayModel::ALL {
        let native = build_grid(model, 1).expect("native grid always builds");
        let native_aspect = native.dz / native.dx;
        if ((aspect - native_aspect) / native_aspect).abs() < 1e-9 {
            return Ok(1540.0 / build_array(model).center_freq);
        }
    }
    Err(CliError::Config(format!(
        "grid aspect dz/dx = {aspect} matches no known array; \
         drop --wavelength-from-array"
    )))
}

pub fn run(args: &MetricsArgs) -> Result<()> {
    let paths = expand_glob(&args.maps)?;
    let mut groups: BTreeMap<String, Vec<EnergyMap>> = BTreeMap::new();
    for path in &paths {
        let map = read_map(path)?;
        groups.entry(group_key(path, map.method)).or_default().push(map);
    }

    let mut csv = String::from(
        "acquisition_id,method,a3db_mm2,isnr_db,centroid_x_mm,centroid_z_mm,\
         dev_lat_wl,dev_ax_wl\n",
    );
    let mut rows = 0usize;
    for (id, maps) in &groups {
        let mut maps: Vec<&EnergyMap> = maps.iter().collect();
        maps.sort_by_key(|m| m.method.tag());
        if maps.windows(2).any(|w| w[0].method == w[1].method) {
            return Err(CliError::Config(format!(
                "group '{id}' has two maps for one method; disambiguate the filenames"
            )));
        }

        let wide: Option<Array2<bool>> = if args.union {
            Some(union_mask(&maps).map_err(|e| {
                CliError::Format(format!("group '{id}': {e}"))
            })?)
        } else {
            None
        };

        let reference = REFERENCE_ORDER
            .into_iter()
            .find(|m| maps.iter().any(|map| map.method == *m))
            .expect("non-empty group always has a reference");
        let ref_map = maps
            .iter()
            .find(|m| m.method == reference)
            .expect("reference chosen from present methods");
        let wavelength = wavelength_for(ref_map, args.wavelength_from_array)?;
        let ref_centroid = pam_core::metrics::centroid(ref_map)?;

        for map in &maps {
            let stats = map_stats(map, wide.as_ref())?;
            let (dev_lat, dev_ax) = if map.method == reference {
                (0.0, 0.0)
            } else {
                (
                    lateral_deviation_wl(stats.centroid, ref_centroid, wavelength),
                    axial_deviation_wl(stats.centroid, ref_centroid, wavelength),
                )
            };
            writeln!(
                csv,
                "{id},{},{},{},{},{},{dev_lat},{dev_ax}",
                map.method,
                stats.a3db_area,
                stats.isnr_db,
                stats.centroid[0] * 1e3,
                stats.centroid[1] * 1e3,
            )
            .expect("writing to a String cannot fail");
            rows += 1;
        }
    }

    std::fs::write(&args.out, csv)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", args.out.display())))?;
    println!(
        "wrote {rows} row(s) across {} group(s) to {}",
        groups.len(),
        args.out.display()
    );
    Ok(())
}
