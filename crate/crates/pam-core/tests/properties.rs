//! Randomized invariant checks: determinism, scaling laws, symmetry, and
//! range guarantees that must hold for every input, not just the worked
//! examples in the unit tests.

use ndarray::Array2;
use pam_core::arrays::{ImagingGrid, Medium};
use pam_core::beamform::{
    dax_factor, eisrcb_weights, rcb_weights, reconstruct, sample_covariance, BeamformParams,
    DelayedStack, Method, Weights,
};
use pam_core::cavsim::{propagate, Emission, EmissionModel, Protocol, RFFrame};
use pam_core::metrics::{area_3db, centroid, deviation_cdf, isnr};
use pam_core::{arrays, beamform};
use proptest::prelude::*;

/// Stack with random entries on the valid prefix and the contractual zero
/// tail, plus one extra channel-length vector for the tests that need it.
fn stack_with_vec(
    n_range: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (DelayedStack, Vec<f64>)> {
    (n_range, 8usize..=32)
        .prop_flat_map(|(n, wlen)| {
            (
                Just(n),
                Just(wlen),
                0usize..=wlen,
                prop::collection::vec(-1.0f64..1.0, n * wlen),
                prop::collection::vec(-1.0f64..1.0, n),
            )
        })
        .prop_map(|(n, wlen, valid, mut flat, extra)| {
            for j in 0..n {
                for t in valid..wlen {
                    flat[j * wlen + t] = 0.0;
                }
            }
            (
                DelayedStack {
                    s: Array2::from_shape_vec((n, wlen), flat).unwrap(),
                    dt: 5.0e-8,
                    window_start: 0,
                    valid,
                },
                extra,
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_scales_quadratically((stack, w) in stack_with_vec(2..=8), alpha in 0.1f64..10.0) {
        let medium = Medium::water();
        let base = Weights {
            w: w.clone().into(),
            method: Method::Tea,
        };
        let e1 = beamform::pixel_energy(&base, &stack, &medium).unwrap();
        let scaled = Weights {
            w: w.iter().map(|v| alpha * v).collect(),
            method: Method::Tea,
        };
        let e2 = beamform::pixel_energy(&scaled, &stack, &medium).unwrap();
        let want = alpha * alpha * e1;
        prop_assert!(
            (e2 - want).abs() <= 1e-12 * want.abs().max(1e-300),
            "E(aw) = {e2}, a^2 E(w) = {want}"
        );

        // Power-of-two weight scaling commutes with every IEEE operation.
        let pow2 = Weights {
            w: w.iter().map(|v| 4.0 * v).collect(),
            method: Method::Tea,
        };
        let e4 = beamform::pixel_energy(&pow2, &stack, &medium).unwrap();
        prop_assert_eq!(e4.to_bits(), (16.0 * e1).to_bits());
    }

    #[test]
    fn dax_factor_stays_in_unit_interval((stack, _) in stack_with_vec(4..=10)) {
        let params = BeamformParams {
            eps: 1.0,
            ..Default::default()
        };
        let f = dax_factor(&stack, &params).unwrap();
        prop_assert!(
            (params.dax_floor..=1.0).contains(&f),
            "factor {f} escapes [{}, 1]",
            params.dax_floor
        );
    }

    #[test]
    fn covariance_is_symmetric_and_psd((stack, v) in stack_with_vec(3..=8)) {
        let cov = sample_covariance(&stack);
        let n = cov.n();
        let mut trace = 0.0;
        for i in 0..n {
            trace += cov.r[[i, i]];
            for j in 0..n {
                prop_assert_eq!(cov.r[[i, j]].to_bits(), cov.r[[j, i]].to_bits());
            }
        }
        // Quadratic forms stay nonnegative up to accumulation rounding.
        let probes: Vec<Vec<f64>> = vec![
            vec![1.0; n],
            (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
            (0..n).map(|i| i as f64 - (n - 1) as f64 / 2.0).collect(),
            v,
        ];
        for p in probes {
            let norm_sq: f64 = p.iter().map(|x| x * x).sum();
            let mut q = 0.0;
            for i in 0..n {
                for j in 0..n {
                    q += p[i] * cov.r[[i, j]] * p[j];
                }
            }
            prop_assert!(
                q >= -1e-10 * trace * norm_sq.max(1.0),
                "x^T R x = {q} for probe {p:?}"
            );
        }
    }

    #[test]
    fn eisrcb_projection_is_idempotent_and_contractive((stack, _) in stack_with_vec(3..=7)) {
        prop_assume!(stack.valid >= stack.n_channels());
        let params = BeamformParams {
            eps: 1.0,
            ..Default::default()
        };
        let cov = sample_covariance(&stack);
        let w_rcb = rcb_weights(&cov, &params).unwrap();
        let e1 = eisrcb_weights(&cov, &w_rcb, &params).unwrap();
        let e2 = eisrcb_weights(&cov, &e1, &params).unwrap();
        let drift = e1
            .w
            .iter()
            .zip(e2.w.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let scale = e1.w.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        prop_assert!(drift <= 1e-10 * (1.0 + scale), "projection drift {drift}");

        let n1 = e1.w.dot(&e1.w).sqrt();
        let n0 = w_rcb.w.dot(&w_rcb.w).sqrt();
        prop_assert!(n1 <= n0 * (1.0 + 1e-12), "projection grew the norm: {n1} > {n0}");
    }

    #[test]
    fn deviation_cdf_is_monotone_quarter_wavelength_binned(
        raw in prop::collection::vec(
            ((-0.05f64..0.05, 0.0f64..0.06), (-0.05f64..0.05, 0.0f64..0.06)),
            1..12,
        ),
        wavelength in 1e-4f64..1e-2,
    ) {
        let pairs: Vec<([f64; 2], [f64; 2])> = raw
            .iter()
            .map(|&((mx, mz), (tx, tz))| ([mx, mz], [tx, tz]))
            .collect();
        let cdf = deviation_cdf(&pairs, wavelength).unwrap();
        prop_assert_eq!(cdf.bin_edges.len(), cdf.cumulative_fraction.len());
        prop_assert!(!cdf.bin_edges.is_empty());
        for (i, &edge) in cdf.bin_edges.iter().enumerate() {
            let want = 0.25 * wavelength * (i + 1) as f64 / wavelength;
            prop_assert!((edge - want).abs() <= 1e-9 * want.max(1.0), "edge {edge} vs {want}");
        }
        let f = &cdf.cumulative_fraction;
        for i in 1..f.len() {
            prop_assert!(f[i] >= f[i - 1], "CDF decreases at bin {i}");
        }
        prop_assert!(f.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert_eq!(*f.last().unwrap(), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn metrics_are_invariant_under_power_of_two_scaling(
        values in prop::collection::vec(0.0f64..1.0, 64),
        k in -6i32..=6,
    ) {
        prop_assume!(k != 0);
        prop_assume!(values.iter().any(|&v| v > 0.0));
        let grid = ImagingGrid {
            x0: -7.0e-4,
            z0: 0.02,
            nx: 8,
            nz: 8,
            dx: 2.0e-4,
            dz: 3.0e-4,
        };
        let map = beamform::EnergyMap {
            grid,
            values: Array2::from_shape_vec((8, 8), values).unwrap(),
            method: Method::Tea,
        };
        let alpha = 2.0f64.powi(k);
        let scaled = beamform::EnergyMap {
            grid,
            values: map.values.mapv(|v| alpha * v),
            method: Method::Tea,
        };

        prop_assert_eq!(area_3db(&map).unwrap(), area_3db(&scaled).unwrap());
        let c1 = centroid(&map).unwrap();
        let c2 = centroid(&scaled).unwrap();
        prop_assert_eq!(c1[0].to_bits(), c2[0].to_bits());
        prop_assert_eq!(c1[1].to_bits(), c2[1].to_bits());
        match (isnr(&map, None), isnr(&scaled, None)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits()),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "ISNR degeneracy changed under scaling: {a:?} vs {b:?}"),
        }
    }
}

/// P4-1 frame with one point source; small trace for the map-level checks.
fn point_source_frame(x: f64, z: f64, samples: Vec<f64>) -> RFFrame {
    let geom = arrays::build_array(arrays::ArrayModel::P41);
    let em = Emission {
        samples,
        sample_rate: geom.sample_rate,
        onset: 5.0e-6,
    };
    propagate(&[([x, z], em)], &geom, &Medium::water(), 0.0, 1024, 0).unwrap()
}

/// Dyadic grid symmetric about x = 0: every pixel x is an exact float and
/// mirror pairs negate bitwise.
fn symmetric_grid() -> ImagingGrid {
    let dx = 2.0f64.powi(-12);
    ImagingGrid {
        x0: -4.0 * dx,
        z0: 0.03125,
        nx: 9,
        nz: 3,
        dx,
        dz: 2.0f64.powi(-9),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn acquisitions_are_bitwise_deterministic(seed in any::<u64>(), index in 0u64..16) {
        let p = Protocol::new(
            arrays::ArrayModel::P41,
            EmissionModel::Vokurka,
            1,
            Some(20.0),
            seed,
        )
        .unwrap();
        let (fa, ta) = p.acquisition(index).unwrap();
        let (fb, tb) = p.acquisition(index).unwrap();
        prop_assert_eq!(&ta, &tb);
        for (a, b) in fa.data.iter().zip(fb.data.iter()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn tea_map_mirrors_bitwise_with_the_source(
        x in 1.0e-4f64..6.0e-3,
        z in 1.5e-2f64..4.0e-2,
        samples in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let grid = symmetric_grid();
        let params = BeamformParams::default();
        let fa = point_source_frame(x, z, samples.clone());
        let fb = point_source_frame(-x, z, samples);
        let ma = reconstruct(&fa, &grid, Method::Tea, &params).unwrap();
        let mb = reconstruct(&fb, &grid, Method::Tea, &params).unwrap();
        for iz in 0..grid.nz {
            for ix in 0..grid.nx {
                prop_assert_eq!(
                    ma.values[[iz, ix]].to_bits(),
                    mb.values[[iz, grid.nx - 1 - ix]].to_bits(),
                    "pixel ({}, {})",
                    ix,
                    iz
                );
            }
        }
    }

    #[test]
    fn tea_map_scales_exactly_with_power_of_two_rf_gain(
        x in 1.0e-4f64..6.0e-3,
        z in 1.5e-2f64..4.0e-2,
        samples in prop::collection::vec(-1.0f64..1.0, 64),
        k in 1i32..=5,
    ) {
        let grid = symmetric_grid();
        let params = BeamformParams::default();
        let frame = point_source_frame(x, z, samples);
        let gain = 2.0f64.powi(k);
        let amplified = RFFrame {
            data: frame.data.mapv(|v| gain * v),
            ..frame.clone()
        };
        let m1 = reconstruct(&frame, &grid, Method::Tea, &params).unwrap();
        let m2 = reconstruct(&amplified, &grid, Method::Tea, &params).unwrap();
        let esq = gain * gain;
        for (a, b) in m1.values.iter().zip(m2.values.iter()) {
            prop_assert_eq!((esq * a).to_bits(), b.to_bits());
        }
    }
}
