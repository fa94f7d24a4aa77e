//! Inertial-cavitation emission: a per-cycle train of one-sided decaying
//! exponential pulses.
//!
//! Each excitation cycle k contributes p_k * exp(-(t - t_k)/theta_k) for
//! t >= t_k, with t_k = k/f + phi_k. Amplitudes, phase offsets, and time
//! constants are drawn per cycle from fixed normal distributions.

use super::Emission;
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Pulse amplitude distribution, Pa.
pub const AMPLITUDE_MEAN: f64 = 14.0e6;
pub const AMPLITUDE_STD: f64 = 10.0e3;
/// Phase offset distribution, s.
pub const PHASE_MEAN: f64 = 14.0e-6;
pub const PHASE_STD: f64 = 10.0e-9;
/// Decay time constant distribution, s.
pub const TIME_CONST_MEAN: f64 = 2.0e-6;
pub const TIME_CONST_STD: f64 = 0.5e-9;

/// Tail cutoff: a pulse stops contributing once it has decayed to this
/// fraction of its amplitude.
const TAIL_CUTOFF: f64 = 1.0e-12;

/// Generates the pulse-train emission for `n_cycles` excitation cycles.
///
/// The sample grid starts exactly at the first pulse time (`onset`), so
/// samples[0] equals the first pulse amplitude. Per cycle, the draw order is
/// amplitude, phase offset, time constant.
pub fn vokurka_emission(
    n_cycles: u32,
    excitation_freq: f64,
    sample_rate: f64,
    n_samples: usize,
    rng: &mut impl Rng,
) -> Result<Emission> {
    if n_cycles == 0 || !(excitation_freq > 0.0) || !(sample_rate > 0.0) || n_samples == 0 {
        return Err(Error::InvalidParameter(
            "cycle count, excitation frequency, sample rate and length must be positive".into(),
        ));
    }
    let amp = Normal::new(AMPLITUDE_MEAN, AMPLITUDE_STD).expect("finite amplitude parameters");
    let phase = Normal::new(PHASE_MEAN, PHASE_STD).expect("finite phase parameters");
    let theta = Normal::new(TIME_CONST_MEAN, TIME_CONST_STD).expect("finite decay parameters");

    let mut pulses = Vec::with_capacity(n_cycles as usize);
    for k in 0..n_cycles {
        let p_k = amp.sample(rng);
        let phi_k = phase.sample(rng);
        let theta_k = theta.sample(rng);
        if !(theta_k > 0.0) {
            return Err(Error::Numerical(format!(
                "drew non-positive pulse time constant {theta_k}"
            )));
        }
        pulses.push((k as f64 / excitation_freq + phi_k, p_k, theta_k));
    }
    // Pulses are spaced by full excitation periods; nanosecond-scale phase
    // jitter cannot reorder them.
    let onset = pulses[0].0;
    debug_assert!(pulses.windows(2).all(|w| w[0].0 < w[1].0));

    let mut samples = vec![0.0; n_samples];
    for &(t_k, p_k, theta_k) in &pulses {
        let offset = (t_k - onset) * sample_rate;
        if offset >= n_samples as f64 {
            continue;
        }
        let i0 = offset.ceil() as usize;
        let decay = (-1.0 / (sample_rate * theta_k)).exp();
        let mut v = p_k * (-((i0 as f64 - offset) / (sample_rate * theta_k))).exp();
        let floor = p_k * TAIL_CUTOFF;
        for s in samples.iter_mut().skip(i0) {
            if v < floor {
                break;
            }
            *s += v;
            v *= decay;
        }
    }
    Ok(Emission {
        samples,
        sample_rate,
        onset,
    })
}
