//! Cavitation energy of one beamformed pixel.
//!
//! The map value is (4 pi / (rho0 c)) * dt * sum_t (w' s(t))^2 over the
//! reconstruction window. Channel reductions walk mirror pairs (j, N-1-j)
//! from the outside in so that a laterally mirrored acquisition produces a
//! bitwise-mirrored map.

use super::stack::DelayedStack;
use super::Weights;
use crate::arrays::Medium;
use crate::error::{Error, Result};

pub fn pixel_energy(weights: &Weights, stack: &DelayedStack, medium: &Medium) -> Result<f64> {
    let n = stack.n_channels();
    if weights.w.len() != n {
        return Err(Error::InvalidParameter(format!(
            "weight vector has {} entries for {} channels",
            weights.w.len(),
            n
        )));
    }
    let w = &weights.w;
    let s = &stack.s;
    let mut acc = 0.0;
    for t in 0..stack.valid {
        let mut beam = 0.0;
        for j in 0..n / 2 {
            let k = n - 1 - j;
            beam += w[j] * s[[j, t]] + w[k] * s[[k, t]];
        }
        if n % 2 == 1 {
            let mid = n / 2;
            beam += w[mid] * s[[mid, t]];
        }
        acc += beam * beam;
    }
    let prefactor = 4.0 * std::f64::consts::PI / (medium.density * medium.sos);
    Ok(acc * stack.dt * prefactor)
}
