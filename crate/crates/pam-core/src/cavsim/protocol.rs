//! The standard acquisition protocol: one seeded draw chain from medium
//! properties to a noisy band-limited RF frame.
//!
//! Every random quantity comes from a role-salted stream keyed by (dataset
//! seed, acquisition index), so changing one setting (say, the noise level)
//! never perturbs the draws of another role, and acquisitions can be
//! generated independently in any order.

use super::cloud::{
    sample_cloud, sample_cloud_pair, uniform, BubbleCloud, CloudRegion, PairPlacement,
};
use super::filter::band_filter;
use super::marmottant::{marmottant_emission, Drive, MarmottantParams};
use super::noise::add_noise;
use super::propagate::propagate;
use super::vokurka::vokurka_emission;
use super::{Emission, EmissionModel, RFFrame, SimSpec, FRAME_SAMPLES};
use crate::arrays::{build_array, ArrayGeometry, ArrayModel, Medium};
use crate::error::Result;
use crate::rng::{stream, StreamRole};
use rand::Rng;

/// Speed-of-sound draw range, m/s.
pub const SOS_RANGE: (f64, f64) = (1480.0, 1600.0);
/// Excitation frequency choices for single-cloud runs, Hz.
pub const SINGLE_CLOUD_FREQS: [f64; 3] = [0.5e6, 1.0e6, 1.5e6];
/// Two-cloud runs are driven at a fixed frequency, Hz.
pub const TWO_CLOUD_FREQ: f64 = 0.5e6;
/// Excitation cycle count draw range.
pub const CYCLES_RANGE: (u32, u32) = (20, 100);
/// Drive pressure mean draw range, Pa.
pub const PRESSURE_MEAN_RANGE: (f64, f64) = (0.1e6, 1.0e6);

/// A reproducible acquisition campaign. Fields are plain settings; ranges
/// may be pinned to a single value to fix a draw (see [`CloudRegion`],
/// [`PairPlacement`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    pub geom: ArrayGeometry,
    pub emission: EmissionModel,
    /// 1 or 2 clouds per acquisition.
    pub n_clouds: u8,
    /// Channel SNR to enforce; None leaves the frame noiseless.
    pub snr_db: Option<f64>,
    /// Dataset seed; acquisitions are indexed on top of it.
    pub seed: u64,
    /// Excitation frequency is drawn uniformly from this list; a singleton
    /// pins it without consuming a draw.
    pub freq_choices: Vec<f64>,
    /// Fixed cycle count; None draws from [`CYCLES_RANGE`].
    pub n_cycles: Option<u32>,
    /// Where cloud centers may fall.
    pub region: CloudRegion,
    /// Two-cloud placement (ignored when n_clouds = 1).
    pub pair: PairPlacement,
    /// Drive pressure mean draw range, Pa (used by the Marmottant model).
    pub pressure_mean: (f64, f64),
    pub marmottant: MarmottantParams,
    /// Medium mass density, kg/m^3 (speed of sound is drawn per acquisition).
    pub density: f64,
}

impl Protocol {
    /// Standard protocol for an array model: full-aperture cloud region,
    /// default placement and shell constants, frequency choices per cloud
    /// count (two-cloud runs pin [`TWO_CLOUD_FREQ`]).
    pub fn new(
        model: ArrayModel,
        emission: EmissionModel,
        n_clouds: u8,
        snr_db: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        let geom = build_array(model);
        // Validate cloud count and the frequency range up front.
        SimSpec::new(n_clouds, 0.5e6, 50, emission, snr_db, Medium::water(), seed)?;
        let freq_choices = if n_clouds == 2 {
            vec![TWO_CLOUD_FREQ]
        } else {
            SINGLE_CLOUD_FREQS.to_vec()
        };
        let region = CloudRegion::for_aperture(geom.aperture);
        Ok(Protocol {
            geom,
            emission,
            n_clouds,
            snr_db,
            seed,
            freq_choices,
            n_cycles: None,
            region,
            pair: PairPlacement::default(),
            pressure_mean: PRESSURE_MEAN_RANGE,
            marmottant: MarmottantParams::default(),
            density: 1000.0,
        })
    }

    /// Generates acquisition `index`: draws the medium, excitation, clouds
    /// and per-bubble emissions, then propagates, band-filters, and (when
    /// configured) injects noise. Returns the frame with its ground truth.
    pub fn acquisition(&self, index: u64) -> Result<(RFFrame, AcquisitionTruth)> {
        let mut medium_rng = stream(self.seed, index, StreamRole::Medium, 0);
        let sos = uniform(&mut medium_rng, SOS_RANGE);
        let medium = Medium::new(sos, self.density)?;

        let mut excitation_rng = stream(self.seed, index, StreamRole::Excitation, 0);
        let freq = if self.freq_choices.len() == 1 {
            self.freq_choices[0]
        } else {
            self.freq_choices[excitation_rng.gen_range(0..self.freq_choices.len())]
        };
        let n_cycles = match self.n_cycles {
            Some(c) => c,
            None => excitation_rng.gen_range(CYCLES_RANGE.0..=CYCLES_RANGE.1),
        };
        let pressure_mean = uniform(&mut excitation_rng, self.pressure_mean);

        // Validates the drawn excitation against the allowed ranges.
        let spec = SimSpec::new(
            self.n_clouds,
            freq,
            n_cycles,
            self.emission,
            self.snr_db,
            medium,
            self.seed,
        )?;

        let clouds: Vec<BubbleCloud> = if self.n_clouds == 2 {
            let mut rng_a = stream(self.seed, index, StreamRole::Cloud, 0);
            let mut rng_b = stream(self.seed, index, StreamRole::Cloud, 1);
            sample_cloud_pair(&self.region, &self.pair, &mut rng_a, &mut rng_b)?.into()
        } else {
            let mut rng = stream(self.seed, index, StreamRole::Cloud, 0);
            vec![sample_cloud(&self.region, &mut rng)?]
        };

        let drive = Drive {
            freq,
            peak_pressure: pressure_mean,
            n_cycles,
        };
        let mut sources: Vec<([f64; 2], Emission)> = Vec::new();
        let mut bubble_index = 0u64;
        for cloud in &clouds {
            for bubble in &cloud.bubbles {
                let mut rng = stream(self.seed, index, StreamRole::Emission, bubble_index);
                let emission = match self.emission {
                    EmissionModel::Marmottant => marmottant_emission(
                        bubble.radius,
                        &drive,
                        &medium,
                        &self.marmottant,
                        self.geom.sample_rate,
                        FRAME_SAMPLES,
                        &mut rng,
                    )?,
                    EmissionModel::Vokurka => vokurka_emission(
                        n_cycles,
                        freq,
                        self.geom.sample_rate,
                        FRAME_SAMPLES,
                        &mut rng,
                    )?,
                };
                sources.push((bubble.position, emission));
                bubble_index += 1;
            }
        }

        let clean = propagate(&sources, &self.geom, &medium, 0.0, FRAME_SAMPLES, self.seed)?;
        let filtered = band_filter(&clean, &self.geom)?;
        let frame = match self.snr_db {
            Some(snr) => {
                let mut rng = stream(self.seed, index, StreamRole::Noise, 0);
                add_noise(&filtered, snr, &mut rng)?
            }
            None => filtered,
        };

        Ok((
            frame,
            AcquisitionTruth {
                acq_index: index,
                spec,
                clouds,
                pressure_mean,
            },
        ))
    }
}

/// Everything the simulator knew when it generated an acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionTruth {
    pub acq_index: u64,
    pub spec: SimSpec,
    pub clouds: Vec<BubbleCloud>,
    /// Drawn drive pressure mean, Pa.
    pub pressure_mean: f64,
}

impl AcquisitionTruth {
    /// Energy-weighted proxy for the source location: the mean cloud center
    /// (bubble counts are similar across clouds, and metrics compare against
    /// per-cloud centers anyway for two-cloud runs).
    #[must_use]
    pub fn cloud_centers(&self) -> Vec<[f64; 2]> {
        self.clouds.iter().map(|c| c.center).collect()
    }
}
