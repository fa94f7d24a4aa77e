//! Cavitation simulation: bubble clouds, emission waveforms, free-field
//! propagation to the array, band filtering, and noise injection.
//!
//! The full acquisition pipeline lives in [`protocol`]; the other submodules
//! are its pure building blocks and are usable on their own.

pub mod cloud;
pub mod filter;
pub mod marmottant;
pub mod noise;
pub mod propagate;
pub mod protocol;
pub mod vokurka;

pub use cloud::{sample_cloud, sample_cloud_pair, Bubble, BubbleCloud, CloudRegion, PairPlacement};
pub use filter::band_filter;
pub use marmottant::{marmottant_emission, Drive, MarmottantParams};
pub use noise::add_noise;
pub use propagate::propagate;
pub use protocol::{AcquisitionTruth, Protocol};
pub use vokurka::vokurka_emission;

use crate::arrays::{ArrayModel, Medium};
use crate::error::{Error, Result};
use ndarray::Array2;

/// Samples per channel trace in the standard acquisition protocol.
pub const FRAME_SAMPLES: usize = 2048;

/// Reference distance for emission waveforms: source pressures are quoted
/// 1 mm from the bubble, and propagation rescales by d_ref/d.
pub const EMISSION_REF_DISTANCE: f64 = 1.0e-3;

/// Which emission model drives the bubbles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmissionModel {
    /// Shelled-bubble radial dynamics (stable cavitation).
    Marmottant,
    /// Per-cycle decaying-exponential pulse train (inertial cavitation).
    Vokurka,
}

impl std::fmt::Display for EmissionModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EmissionModel::Marmottant => "marmottant",
            EmissionModel::Vokurka => "vokurka",
        })
    }
}

impl std::str::FromStr for EmissionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "marmottant" => Ok(EmissionModel::Marmottant),
            "vokurka" => Ok(EmissionModel::Vokurka),
            other => Err(Error::InvalidParameter(format!(
                "unknown emission model '{other}' (expected marmottant or vokurka)"
            ))),
        }
    }
}

/// Fully specified per-acquisition simulation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub n_clouds: u8,
    /// Excitation (drive) frequency, Hz.
    pub excitation_freq: f64,
    /// Number of excitation cycles.
    pub n_cycles: u32,
    pub model: EmissionModel,
    /// Target channel SNR; None means no added noise.
    pub snr_db: Option<f64>,
    pub medium: Medium,
    /// Dataset seed this acquisition derives from.
    pub seed: u64,
}

impl SimSpec {
    /// Validates: 1 or 2 clouds, excitation in [0.25, 3] MHz, cycles in [5, 200].
    pub fn new(
        n_clouds: u8,
        excitation_freq: f64,
        n_cycles: u32,
        model: EmissionModel,
        snr_db: Option<f64>,
        medium: Medium,
        seed: u64,
    ) -> Result<Self> {
        if !(n_clouds == 1 || n_clouds == 2) {
            return Err(Error::InvalidParameter(format!(
                "n_clouds must be 1 or 2, got {n_clouds}"
            )));
        }
        if !(0.25e6..=3.0e6).contains(&excitation_freq) {
            return Err(Error::InvalidParameter(format!(
                "excitation frequency {excitation_freq} Hz outside [0.25, 3] MHz"
            )));
        }
        if !(5..=200).contains(&n_cycles) {
            return Err(Error::InvalidParameter(format!(
                "cycle count {n_cycles} outside [5, 200]"
            )));
        }
        Ok(SimSpec {
            n_clouds,
            excitation_freq,
            n_cycles,
            model,
            snr_db,
            medium,
            seed,
        })
    }
}

/// One bubble's source pressure waveform, quoted at [`EMISSION_REF_DISTANCE`].
///
/// `samples[i]` is the pressure at time `onset + i / sample_rate`; the
/// waveform is zero outside the half-open support
/// `[onset, onset + (len-1)/sample_rate)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    /// Absolute time of samples[0], s.
    pub onset: f64,
}

impl Emission {
    /// Waveform value at absolute time `t`, linearly interpolated between
    /// samples; zero outside the sampled support.
    #[must_use]
    pub fn value_at(&self, t: f64) -> f64 {
        let x = (t - self.onset) * self.sample_rate;
        if x < 0.0 {
            return 0.0;
        }
        let i = x as usize;
        if i + 1 >= self.samples.len() {
            return 0.0;
        }
        let w = x - i as f64;
        self.samples[i] + w * (self.samples[i + 1] - self.samples[i])
    }

    /// Duration of the sampled support, s.
    #[must_use]
    pub fn duration(&self) -> f64 {
        (self.samples.len().saturating_sub(1)) as f64 / self.sample_rate
    }
}

/// Passively received N-channel RF data.
#[derive(Debug, Clone, PartialEq)]
pub struct RFFrame {
    pub model: ArrayModel,
    /// Channel traces, shape (n_channels, n_samples).
    pub data: Array2<f64>,
    pub sample_rate: f64,
    /// Absolute time of sample 0 on every channel, s.
    pub t_start: f64,
    pub medium: Medium,
    /// Dataset seed recorded for provenance in the file format.
    pub seed: u64,
}

impl RFFrame {
    pub fn n_channels(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.data.ncols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        let m = Medium::water();
        assert!(SimSpec::new(1, 0.5e6, 50, EmissionModel::Vokurka, None, m, 0).is_ok());
        assert!(SimSpec::new(3, 0.5e6, 50, EmissionModel::Vokurka, None, m, 0).is_err());
        assert!(SimSpec::new(1, 0.1e6, 50, EmissionModel::Vokurka, None, m, 0).is_err());
        assert!(SimSpec::new(1, 0.5e6, 4, EmissionModel::Vokurka, None, m, 0).is_err());
        assert!(SimSpec::new(1, 0.5e6, 201, EmissionModel::Vokurka, None, m, 0).is_err());
    }

    #[test]
    fn emission_interpolation() {
        let e = Emission {
            samples: vec![0.0, 2.0, 4.0],
            sample_rate: 1.0,
            onset: 10.0,
        };
        assert_eq!(e.value_at(9.999), 0.0);
        assert_eq!(e.value_at(10.0), 0.0);
        assert_eq!(e.value_at(10.5), 1.0);
        assert_eq!(e.value_at(11.0), 2.0);
        assert_eq!(e.value_at(11.75), 3.5);
        // Support ends at the final sample.
        assert_eq!(e.value_at(12.0), 0.0);
        assert_eq!(e.value_at(13.0), 0.0);
        assert_eq!(e.duration(), 2.0);
    }

    #[test]
    fn model_names_round_trip() {
        for m in [EmissionModel::Marmottant, EmissionModel::Vokurka] {
            assert_eq!(m.to_string().parse::<EmissionModel>().unwrap(), m);
        }
        assert!("gilmore".parse::<EmissionModel>().is_err());
    }
}
