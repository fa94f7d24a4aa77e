//! Free-field propagation of point-source emissions to the array elements.
//!
//! Straight rays in a homogeneous medium with spherical spreading: channel j
//! receives sum_b (d_ref / d_jb) * e_b(t - d_jb / c). Fractional propagation
//! delays are applied by the emission's linear interpolation.

use super::{Emission, RFFrame, EMISSION_REF_DISTANCE};
use crate::arrays::{element_path, ArrayGeometry, Medium};
use crate::error::{Error, Result};
use ndarray::Array2;

/// Propagates `sources` (position, emission) to every element and samples
/// `n_samples` points per channel starting at `t_start`.
///
/// Channels accumulate sources in slice order, so the output is a pure
/// function of the argument order; callers keep a fixed source order for
/// reproducibility.
pub fn propagate(
    sources: &[([f64; 2], Emission)],
    geom: &ArrayGeometry,
    medium: &Medium,
    t_start: f64,
    n_samples: usize,
    seed: u64,
) -> Result<RFFrame> {
    for (_, e) in sources {
        if e.sample_rate != geom.sample_rate {
            return Err(Error::SampleRateMismatch {
                emission_hz: e.sample_rate,
                frame_hz: geom.sample_rate,
            });
        }
    }
    let n = geom.n_elements;
    let fs = geom.sample_rate;
    let mut data = Array2::<f64>::zeros((n, n_samples));
    for j in 0..n {
        let mut row = data.row_mut(j);
        let row = row.as_slice_mut().expect("row-major frame layout");
        for (pos, emission) in sources {
            let (dist, delay) = element_path(geom, medium, *pos, j)?;
            let scale = EMISSION_REF_DISTANCE / dist;
            // Sample i sits at t_start + i/fs; the emission interpolator
            // handles the fractional delay and out-of-support zeros.
            let offset = t_start - delay;
            for (i, out) in row.iter_mut().enumerate() {
                let v = emission.value_at(offset + i as f64 / fs);
                *out += scale * v;
            }
        }
    }
    Ok(RFFrame {
        model: geom.model,
        data,
        sample_rate: fs,
        t_start,
        medium: *medium,
        seed,
    })
}
