//! Image-quality and localization metrics for cavitation energy maps.
//!
//! All thresholds are relative to the map maximum and strict, so every
//! metric is invariant under positive scaling of the map. Lateral sums walk
//! mirror pixel pairs from the outside in, which keeps the centroid's
//! x-coordinate an exact negation under lateral mirroring of the map.

use crate::beamform::EnergyMap;
use crate::error::{Error, Result};
use ndarray::Array2;

/// Fraction of the maximum bounding the signal region (-3 dB).
pub const HALF_MAX_FRACTION: f64 = 0.5;
/// Fraction of the maximum bounding the evaluation region (-20 dB).
pub const NOISE_FLOOR_FRACTION: f64 = 0.01;

/// Slack applied when counting a deviation against a bin edge, so exact
/// multiples of the bin width land in their nominal bin.
const EDGE_SLACK: f64 = 1e-9;

/// Headline statistics of one energy map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapStats {
    /// Signal-region area, mm^2.
    pub a3db_area: f64,
    pub isnr_db: f64,
    /// Energy-weighted source position (x, z), m.
    pub centroid: [f64; 2],
}

/// Cumulative distribution of localization deviations in wavelength units.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationCDF {
    /// Upper bin edges at 0.25-wavelength spacing.
    pub bin_edges: Vec<f64>,
    /// Fraction of deviations at or below each edge; final entry is 1.
    pub cumulative_fraction: Vec<f64>,
}

/// Pixels strictly above `frac` times the map maximum.
pub fn threshold_mask(map: &EnergyMap, frac: f64) -> Array2<bool> {
    let cut = frac * map.max_value();
    map.values.map(|&v| v > cut)
}

/// Union of the maps' noise-floor regions, for cross-method ISNR.
pub fn union_mask(maps: &[&EnergyMap]) -> Result<Array2<bool>> {
    let Some(first) = maps.first() else {
        return Err(Error::InvalidParameter(
            "union mask needs at least one map".into(),
        ));
    };
    let dim = first.values.dim();
    let mut out = Array2::from_elem(dim, false);
    for map in maps {
        if map.values.dim() != dim {
            return Err(Error::InvalidParameter(format!(
                "union mask over mismatched map shapes {:?} and {:?}",
                dim,
                map.values.dim()
            )));
        }
        let mask = threshold_mask(map, NOISE_FLOOR_FRACTION);
        out.zip_mut_with(&mask, |o, &m| *o |= m);
    }
    Ok(out)
}

/// Area of the region strictly above half maximum, mm^2.
pub fn area_3db(map: &EnergyMap) -> Result<f64> {
    if !(map.max_value() > 0.0) {
        return Err(Error::DegenerateMap(
            "map has no positive energy; the half-maximum area is undefined".into(),
        ));
    }
    let count = threshold_mask(map, HALF_MAX_FRACTION)
        .iter()
        .filter(|&&m| m)
        .count();
    Ok(count as f64 * map.grid.dx * map.grid.dz * 1e6)
}

/// Interference-to-signal-plus-noise ratio, dB: mean energy inside the
/// signal region over mean energy in the evaluation region outside it.
/// `wide` is the evaluation region; when absent, this map's own noise-floor
/// region is used.
pub fn isnr(map: &EnergyMap, wide: Option<&Array2<bool>>) -> Result<f64> {
    if !(map.max_value() > 0.0) {
        return Err(Error::DegenerateMap(
            "map has no positive energy; ISNR is undefined".into(),
        ));
    }
    let inside = threshold_mask(map, HALF_MAX_FRACTION);
    let own;
    let wide = match wide {
        Some(m) => {
            if m.dim() != map.values.dim() {
                return Err(Error::InvalidParameter(format!(
                    "evaluation mask shape {:?} does not match map shape {:?}",
                    m.dim(),
                    map.values.dim()
                )));
            }
            m
        }
        None => {
            own = threshold_mask(map, NOISE_FLOOR_FRACTION);
            &own
        }
    };

    let mut sum_in = 0.0;
    let mut n_in = 0usize;
    let mut sum_out = 0.0;
    let mut n_out = 0usize;
    for ((v, &is_in), &is_wide) in map.values.iter().zip(inside.iter()).zip(wide.iter()) {
        if is_in {
            sum_in += v;
            n_in += 1;
        } else if is_wide {
            sum_out += v;
            n_out += 1;
        }
    }
    if n_out == 0 {
        return Err(Error::DegenerateMap(
            "evaluation region adds nothing outside the signal region".into(),
        ));
    }
    let mean_in = sum_in / n_in as f64;
    let mean_out = sum_out / n_out as f64;
    if !(mean_out > 0.0) {
        return Err(Error::DegenerateMap(
            "evaluation region outside the signal carries no energy".into(),
        ));
    }
    Ok(10.0 * (mean_in / mean_out).log10())
}

/// Energy-weighted centroid (x, z) in meters over the signal region.
pub fn centroid(map: &EnergyMap) -> Result<[f64; 2]> {
    if !(map.max_value() > 0.0) {
        return Err(Error::DegenerateMap(
            "map has no positive energy; the centroid is undefined".into(),
        ));
    }
    let mask = threshold_mask(map, HALF_MAX_FRACTION);
    let g = &map.grid;
    let (nz, nx) = map.values.dim();
    let mut num_x = 0.0;
    let mut num_z = 0.0;
    let mut den = 0.0;
    for iz in 0..nz {
        let mut row_x = 0.0;
        let mut row_w = 0.0;
        for ix in 0..nx / 2 {
            let k = nx - 1 - ix;
            let a = if mask[[iz, ix]] { map.values[[iz, ix]] } else { 0.0 };
            let b = if mask[[iz, k]] { map.values[[iz, k]] } else { 0.0 };
            row_x += a * g.pixel_x(ix) + b * g.pixel_x(k);
            row_w += a + b;
        }
        if nx % 2 == 1 {
            let mid = nx / 2;
            if mask[[iz, mid]] {
                let v = map.values[[iz, mid]];
                row_x += v * g.pixel_x(mid);
                row_w += v;
            }
        }
        num_x += row_x;
        num_z += row_w * g.pixel_z(iz);
        den += row_w;
    }
    Ok([num_x / den, num_z / den])
}

/// Bundles the three per-map metrics; see the individual operations.
pub fn map_stats(map: &EnergyMap, wide: Option<&Array2<bool>>) -> Result<MapStats> {
    Ok(MapStats {
        a3db_area: area_3db(map)?,
        isnr_db: isnr(map, wide)?,
        centroid: centroid(map)?,
    })
}

/// Absolute lateral centroid deviation in wavelengths.
pub fn lateral_deviation_wl(measured: [f64; 2], truth: [f64; 2], wavelength: f64) -> f64 {
    (measured[0] - truth[0]).abs() / wavelength
}

/// Absolute axial centroid deviation in wavelengths.
pub fn axial_deviation_wl(measured: [f64; 2], truth: [f64; 2], wavelength: f64) -> f64 {
    (measured[1] - truth[1]).abs() / wavelength
}

/// Euclidean centroid deviation in wavelengths.
pub fn euclidean_deviation_wl(measured: [f64; 2], truth: [f64; 2], wavelength: f64) -> f64 {
    let dx = (measured[0] - truth[0]) / wavelength;
    let dz = (measured[1] - truth[1]) / wavelength;
    (dx * dx + dz * dz).sqrt()
}

/// Cumulative distribution of Euclidean deviations between measured and
/// true positions, binned at quarter-wavelength edges.
pub fn deviation_cdf(
    pairs: &[([f64; 2], [f64; 2])],
    wavelength: f64,
) -> Result<DeviationCDF> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter(
            "deviation CDF needs at least one centroid pair".into(),
        ));
    }
    if !(wavelength > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    let devs: Vec<f64> = pairs
        .iter()
        .map(|&(a, b)| euclidean_deviation_wl(a, b, wavelength))
        .collect();
    let dmax = devs.iter().fold(0.0f64, |m, &d| m.max(d));
    let n_bins = ((dmax / 0.25 - EDGE_SLACK).ceil().max(1.0)) as usize;
    let bin_edges: Vec<f64> = (1..=n_bins).map(|k| k as f64 * 0.25).collect();
    let total = devs.len() as f64;
    let cumulative_fraction = bin_edges
        .iter()
        .map(|&e| devs.iter().filter(|&&d| d <= e + EDGE_SLACK).count() as f64 / total)
        .collect();
    Ok(DeviationCDF {
        bin_edges,
        cumulative_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::ImagingGrid;
    use crate::beamform::Method;
    use approx::assert_relative_eq;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn map_from(values: Array2<f64>, dx: f64, dz: f64) -> EnergyMap {
        let (nz, nx) = values.dim();
        EnergyMap {
            grid: ImagingGrid {
                x0: -(nx as f64 - 1.0) / 2.0 * dx,
                z0: 10e-3,
                nx,
                nz,
                dx,
                dz,
            },
            values,
            method: Method::Tea,
        }
    }

    #[test]
    fn single_pixel_area_is_one_cell() {
        let mut v = Array2::zeros((5, 5));
        v[[2, 3]] = 7.0;
        let map = map_from(v, 0.1e-3, 0.1e-3);
        assert_relative_eq!(area_3db(&map).unwrap(), 0.01, max_relative = 1e-12);
    }

    #[test]
    fn uniform_map_covers_the_full_image() {
        let map = map_from(Array2::from_elem((6, 8), 3.0), 0.2e-3, 0.1e-3);
        let expect = 48.0 * 0.2 * 0.1;
        assert_relative_eq!(area_3db(&map).unwrap(), expect, max_relative = 1e-12);
    }

    #[test]
    fn gaussian_blob_area_matches_the_half_maximum_disk() {
        // sigma = 1 mm; the half-maximum contour is a disk of radius
        // sigma * sqrt(2 ln 2).
        let sigma = 1e-3;
        let d = 0.02e-3;
        let n = 400;
        let v = Array2::from_shape_fn((n, n), |(iz, ix)| {
            let x = (ix as f64 - (n as f64 - 1.0) / 2.0) * d;
            let z = (iz as f64 - (n as f64 - 1.0) / 2.0) * d;
            (-(x * x + z * z) / (2.0 * sigma * sigma)).exp()
        });
        let map = map_from(v, d, d);
        let fwhm = 2.0 * sigma * (2.0 * f64::ln(2.0)).sqrt();
        let analytic = std::f64::consts::PI * (fwhm / 2.0).powi(2) * 1e6;
        let got = area_3db(&map).unwrap();
        assert!(
            (got - analytic).abs() / analytic < 0.02,
            "area {got} vs analytic {analytic}"
        );
    }

    #[test]
    fn degenerate_maps_are_rejected_by_every_metric() {
        let map = map_from(Array2::zeros((4, 4)), 1e-4, 1e-4);
        assert!(matches!(area_3db(&map), Err(Error::DegenerateMap(_))));
        assert!(matches!(isnr(&map, None), Err(Error::DegenerateMap(_))));
        assert!(matches!(centroid(&map), Err(Error::DegenerateMap(_))));

        // A uniform map has no pixels outside the signal region.
        let flat = map_from(Array2::from_elem((4, 4), 2.0), 1e-4, 1e-4);
        assert!(matches!(isnr(&flat, None), Err(Error::DegenerateMap(_))));
    }

    #[test]
    fn isnr_hand_values() {
        // max 8: the four 8s sit above half maximum, the twelve 1s sit above
        // the noise floor (8/100) but below half maximum.
        let mut v = Array2::zeros((6, 6));
        for &(iz, ix) in &[(2, 2), (2, 3), (3, 2), (3, 3)] {
            v[[iz, ix]] = 8.0;
        }
        let mut placed = 0;
        'outer: for iz in 0..6 {
            for ix in 0..6 {
                if v[[iz, ix]] == 0.0 {
                    v[[iz, ix]] = 1.0;
                    placed += 1;
                    if placed == 12 {
                        break 'outer;
                    }
                }
            }
        }
        let map = map_from(v, 1e-4, 1e-4);
        assert_relative_eq!(
            isnr(&map, None).unwrap(),
            10.0 * 8f64.log10(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn isnr_with_a_provided_evaluation_mask() {
        // Inside mean 100, outside mean 1 under an explicit mask -> 20 dB,
        // even though the 1s sit exactly on this map's own noise floor.
        let mut v = Array2::zeros((4, 4));
        v[[1, 1]] = 100.0;
        v[[1, 2]] = 100.0;
        v[[2, 1]] = 1.0;
        v[[2, 2]] = 1.0;
        let map = map_from(v, 1e-4, 1e-4);
        let mask = Array2::from_shape_fn((4, 4), |(iz, ix)| (1..=2).contains(&iz) && (1..=2).contains(&ix));
        assert_relative_eq!(isnr(&map, Some(&mask)).unwrap(), 20.0, max_relative = 1e-12);
        // Mask shaped for a different grid is rejected.
        let bad = Array2::from_elem((3, 3), true);
        assert!(matches!(
            isnr(&map, Some(&bad)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn isnr_matches_a_direct_two_region_oracle() {
        let mut rng = StdRng::seed_from_u64(23);
        let v = Array2::from_shape_fn((40, 40), |_| rng.gen_range(0.0..1.0f64).powi(3));
        let map = map_from(v, 1e-4, 1e-4);
        let got = isnr(&map, None).unwrap();

        let max = map.values.iter().cloned().fold(f64::MIN, f64::max);
        let mut inside = Vec::new();
        let mut outside = Vec::new();
        for &val in map.values.iter() {
            if val > max / 2.0 {
                inside.push(val);
            } else if val > max / 100.0 {
                outside.push(val);
            }
        }
        let mean = |v: &[f64]| v.iter().rev().sum::<f64>() / v.len() as f64;
        let expect = 10.0 * (mean(&inside) / mean(&outside)).log10();
        assert!((got - expect).abs() < 1e-10, "{got} vs {expect}");
    }

    #[test]
    fn centroid_hand_cases() {
        let mut v = Array2::zeros((5, 7));
        v[[2, 4]] = 3.0;
        let map = map_from(v, 1e-4, 2e-4);
        let c = centroid(&map).unwrap();
        assert_relative_eq!(c[0], map.grid.pixel_x(4), max_relative = 1e-12);
        assert_relative_eq!(c[1], map.grid.pixel_z(2), max_relative = 1e-12);

        let mut v = Array2::zeros((5, 7));
        v[[1, 2]] = 5.0;
        v[[3, 2]] = 5.0;
        let map = map_from(v, 1e-4, 2e-4);
        let c = centroid(&map).unwrap();
        assert_relative_eq!(c[0], map.grid.pixel_x(2), max_relative = 1e-12);
        assert_relative_eq!(
            c[1],
            0.5 * (map.grid.pixel_z(1) + map.grid.pixel_z(3)),
            max_relative = 1e-12
        );
    }

    #[test]
    fn centroid_matches_a_weighted_mean_oracle() {
        let mut rng = StdRng::seed_from_u64(31);
        let n = 24;
        let v = Array2::from_shape_fn((n, n), |(iz, ix)| {
            let x = ix as f64 - 9.0;
            let z = iz as f64 - 13.0;
            (-(x * x + z * z) / 30.0).exp() * (1.0 + 0.1 * rng.gen_range(-1.0..1.0))
        });
        let map = map_from(v, 1e-4, 1e-4);
        let c = centroid(&map).unwrap();

        let max = map.values.iter().cloned().fold(f64::MIN, f64::max);
        let (mut sx, mut sz, mut sw) = (0.0, 0.0, 0.0);
        for ((iz, ix), &val) in map.values.indexed_iter() {
            if val > max / 2.0 {
                sx += val * map.grid.pixel_x(ix);
                sz += val * map.grid.pixel_z(iz);
                sw += val;
            }
        }
        assert_relative_eq!(c[0], sx / sw, max_relative = 1e-12, epsilon = 1e-15);
        assert_relative_eq!(c[1], sz / sw, max_relative = 1e-12);
    }

    #[test]
    fn lateral_mirror_negates_the_centroid_x_bitwise() {
        // Dyadic symmetric grid: pixel_x(nx-1-i) is the exact negation of
        // pixel_x(i), so the mirrored centroid must negate exactly.
        let mut rng = StdRng::seed_from_u64(37);
        let nx = 16;
        let nz = 9;
        let dx = (2.0f64).powi(-13);
        let v = Array2::from_shape_fn((nz, nx), |_| rng.gen_range(0.0..1.0));
        let mirrored = Array2::from_shape_fn((nz, nx), |(iz, ix)| v[[iz, nx - 1 - ix]]);
        let grid = ImagingGrid {
            x0: -((nx - 1) as f64) / 2.0 * dx,
            z0: 1e-3,
            nx,
            nz,
            dx,
            dz: 1e-4,
        };
        let map = EnergyMap { grid, values: v, method: Method::Tea };
        let mmap = EnergyMap { grid, values: mirrored, method: Method::Tea };
        let c = centroid(&map).unwrap();
        let cm = centroid(&mmap).unwrap();
        assert_eq!(cm[0], -c[0]);
        assert_eq!(cm[1], c[1]);
    }

    #[test]
    fn metrics_are_scale_invariant() {
        let mut rng = StdRng::seed_from_u64(41);
        let v = Array2::from_shape_fn((20, 20), |_| rng.gen_range(0.0..1.0f64).powi(2));
        let base = map_from(v.clone(), 1e-4, 2e-4);
        for alpha in [0.0625, 1024.0] {
            let scaled = map_from(v.mapv(|x| alpha * x), 1e-4, 2e-4);
            assert_eq!(area_3db(&scaled).unwrap(), area_3db(&base).unwrap());
            assert_eq!(
                isnr(&scaled, None).unwrap().to_bits(),
                isnr(&base, None).unwrap().to_bits()
            );
            assert_eq!(centroid(&scaled).unwrap(), centroid(&base).unwrap());
        }
        let scaled = map_from(v.mapv(|x| 3.7 * x), 1e-4, 2e-4);
        assert_relative_eq!(
            isnr(&scaled, None).unwrap(),
            isnr(&base, None).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn centroid_stays_inside_the_signal_bounding_box() {
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..5 {
            let v = Array2::from_shape_fn((15, 15), |_| rng.gen_range(0.0..1.0));
            let map = map_from(v, 1e-4, 1e-4);
            let mask = threshold_mask(&map, HALF_MAX_FRACTION);
            let c = centroid(&map).unwrap();
            let xs: Vec<f64> = mask
                .indexed_iter()
                .filter(|(_, &m)| m)
                .map(|((_, ix), _)| map.grid.pixel_x(ix))
                .collect();
            let zs: Vec<f64> = mask
                .indexed_iter()
                .filter(|(_, &m)| m)
                .map(|((iz, _), _)| map.grid.pixel_z(iz))
                .collect();
            let lo = |v: &[f64]| v.iter().cloned().fold(f64::MAX, f64::min);
            let hi = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max);
            assert!(c[0] >= lo(&xs) - 1e-15 && c[0] <= hi(&xs) + 1e-15);
            assert!(c[1] >= lo(&zs) - 1e-15 && c[1] <= hi(&zs) + 1e-15);
        }
    }

    #[test]
    fn union_mask_or_combines_noise_floors() {
        let mut a = Array2::zeros((3, 3));
        a[[0, 0]] = 1.0;
        let mut b = Array2::zeros((3, 3));
        b[[2, 2]] = 1.0;
        let ma = map_from(a, 1e-4, 1e-4);
        let mb = map_from(b, 1e-4, 1e-4);
        let u = union_mask(&[&ma, &mb]).unwrap();
        assert!(u[[0, 0]] && u[[2, 2]]);
        assert_eq!(u.iter().filter(|&&m| m).count(), 2);

        let small = map_from(Array2::from_elem((2, 2), 1.0), 1e-4, 1e-4);
        assert!(matches!(
            union_mask(&[&ma, &small]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(union_mask(&[]), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn map_stats_bundles_the_individual_metrics() {
        let mut rng = StdRng::seed_from_u64(47);
        let v = Array2::from_shape_fn((12, 12), |_| rng.gen_range(0.0..1.0f64).powi(2));
        let map = map_from(v, 1e-4, 1e-4);
        let stats = map_stats(&map, None).unwrap();
        assert_eq!(stats.a3db_area, area_3db(&map).unwrap());
        assert_eq!(stats.isnr_db, isnr(&map, None).unwrap());
        assert_eq!(stats.centroid, centroid(&map).unwrap());
    }

    #[test]
    fn identical_pairs_fill_the_first_bin() {
        let p = [1e-3, 2e-3];
        let cdf = deviation_cdf(&[(p, p), (p, p)], 1e-3).unwrap();
        assert_eq!(cdf.bin_edges, vec![0.25]);
        assert_eq!(cdf.cumulative_fraction, vec![1.0]);
    }

    #[test]
    fn a_two_wavelength_pair_lands_exactly_on_its_edge() {
        let lam = 1e-3;
        let cdf = deviation_cdf(&[([0.0, 0.0], [2.0 * lam, 0.0])], lam).unwrap();
        assert_eq!(cdf.bin_edges.len(), 8);
        assert_relative_eq!(*cdf.bin_edges.last().unwrap(), 2.0, max_relative = 1e-15);
        for (k, &f) in cdf.cumulative_fraction.iter().enumerate() {
            if k + 1 < 8 {
                assert_eq!(f, 0.0);
            } else {
                assert_eq!(f, 1.0);
            }
        }
    }

    #[test]
    fn cdf_matches_a_counting_oracle_and_is_monotone() {
        let mut rng = StdRng::seed_from_u64(53);
        let lam = 0.616e-3;
        let pairs: Vec<([f64; 2], [f64; 2])> = (0..100)
            .map(|_| {
                let a = [rng.gen_range(-5e-3..5e-3), rng.gen_range(10e-3..30e-3)];
                let b = [
                    a[0] + rng.gen_range(-2e-3..2e-3),
                    a[1] + rng.gen_range(-2e-3..2e-3),
                ];
                (a, b)
            })
            .collect();
        let cdf = deviation_cdf(&pairs, lam).unwrap();

        let devs: Vec<f64> = pairs
            .iter()
            .map(|&(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]) / lam)
            .collect();
        for (&edge, &frac) in cdf.bin_edges.iter().zip(&cdf.cumulative_fraction) {
            let count = devs.iter().filter(|&&d| d <= edge + 1e-9).count();
            assert_eq!(frac, count as f64 / devs.len() as f64, "edge {edge}");
        }
        assert!(cdf
            .cumulative_fraction
            .windows(2)
            .all(|w| w[0] <= w[1]));
        assert_eq!(*cdf.cumulative_fraction.last().unwrap(), 1.0);
        assert!(cdf
            .bin_edges
            .windows(2)
            .all(|w| (w[1] - w[0] - 0.25).abs() < 1e-12));
    }

    #[test]
    fn cdf_rejects_empty_or_unphysical_inputs() {
        assert!(matches!(
            deviation_cdf(&[], 1e-3),
            Err(Error::InvalidParameter(_))
        ));
        let p = [0.0, 0.0];
        assert!(matches!(
            deviation_cdf(&[(p, p)], 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn deviation_components_are_absolute_and_in_wavelengths() {
        let lam = 2e-3;
        let a = [1e-3, 20e-3];
        let b = [3e-3, 19e-3];
        assert_relative_eq!(lateral_deviation_wl(a, b, lam), 1.0, max_relative = 1e-12);
        assert_relative_eq!(axial_deviation_wl(a, b, lam), 0.5, max_relative = 1e-12);
        assert_relative_eq!(
            euclidean_deviation_wl(a, b, lam),
            (1.25f64).sqrt(),
            max_relative = 1e-12
        );
    }
}
