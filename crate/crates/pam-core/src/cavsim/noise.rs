//! Additive white Gaussian channel noise at a prescribed SNR.

use super::RFFrame;
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// Adds i.i.d. Gaussian noise to every sample so that
/// 10*log10(P_signal / P_noise) = `snr_db`, with powers measured over the
/// whole frame. Draws run channel-major for a fixed stream layout.
pub fn add_noise(rf: &RFFrame, snr_db: f64, rng: &mut impl Rng) -> Result<RFFrame> {
    let n = rf.data.len();
    let p_signal = rf.data.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if !(p_signal > 0.0) {
        return Err(Error::CannotSetSnr);
    }
    let sigma = (p_signal * 10.0f64.powf(-snr_db / 10.0)).sqrt();
    let mut out = rf.clone();
    for v in out.data.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *v += sigma * z;
    }
    Ok(out)
}
