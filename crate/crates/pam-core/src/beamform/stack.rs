//! Per-pixel delayed, distance-compensated signal stacks.

use crate::arrays::{element_paths, ArrayGeometry, Medium};
use crate::cavsim::RFFrame;
use crate::error::{Error, Result};
use ndarray::Array2;

/// Delayed element signals for one field point:
/// `s[j][t] = d_j * p_j((window_start + t)/fs + tau_j)`, linearly
/// interpolated at fractional delays; samples delayed beyond the trace end
/// are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayedStack {
    /// Shape (n_channels, window length).
    pub s: Array2<f64>,
    /// Sample period, s.
    pub dt: f64,
    /// Window start T0, samples into the trace.
    pub window_start: usize,
    /// Columns at or beyond this index are identically zero on every
    /// channel (the delay pushed them past the trace end), so reductions
    /// over the window may stop here without changing their value.
    pub valid: usize,
}

impl DelayedStack {
    pub fn n_channels(&self) -> usize {
        self.s.nrows()
    }

    pub fn n_snapshots(&self) -> usize {
        self.s.ncols()
    }

    /// Covariance estimates want at least as many snapshots as channels;
    /// callers may warn when this does not hold.
    #[must_use]
    pub fn has_enough_snapshots(&self) -> bool {
        self.n_snapshots() >= self.n_channels()
    }
}

/// Builds the delayed stack for field point `r` over the given
/// `(start, length)` sample window (None = the full trace).
pub fn delay_stack(
    rf: &RFFrame,
    r: [f64; 2],
    geom: &ArrayGeometry,
    medium: &Medium,
    window: Option<(usize, usize)>,
) -> Result<DelayedStack> {
    if rf.sample_rate != geom.sample_rate {
        return Err(Error::SampleRateMismatch {
            emission_hz: rf.sample_rate,
            frame_hz: geom.sample_rate,
        });
    }
    if rf.model != geom.model || rf.n_channels() != geom.n_elements {
        return Err(Error::InvalidParameter(format!(
            "frame ({}, {} channels) does not match geometry ({}, {} elements)",
            rf.model,
            rf.n_channels(),
            geom.model,
            geom.n_elements
        )));
    }
    let t_len = rf.n_samples();
    let (w0, wlen) = window.unwrap_or((0, t_len));
    if wlen == 0 || w0 + wlen > t_len {
        return Err(Error::InvalidParameter(format!(
            "window ({w0}, {wlen}) exceeds the {t_len}-sample trace"
        )));
    }

    let paths = element_paths(geom, medium, r)?;
    let fs = geom.sample_rate;
    let mut s = Array2::zeros((geom.n_elements, wlen));
    let mut min_shift = f64::INFINITY;
    for (j, &(dist, delay)) in paths.iter().enumerate() {
        let shift = w0 as f64 + delay * fs;
        min_shift = min_shift.min(shift);
        let trace = rf.data.row(j);
        let trace = trace.as_slice().expect("row-major frame");
        let mut row = s.row_mut(j);
        let row = row.as_slice_mut().expect("row-major stack");
        for (t, out) in row.iter_mut().enumerate() {
            let x = t as f64 + shift;
            let i = x as usize;
            if i + 1 >= t_len {
                break;
            }
            let frac = x - i as f64;
            *out = dist * (trace[i] + frac * (trace[i + 1] - trace[i]));
        }
    }
    let valid = ((t_len as f64 - 1.0) - min_shift)
        .ceil()
        .clamp(0.0, wlen as f64) as usize;
    Ok(DelayedStack {
        s,
        dt: 1.0 / fs,
        window_start: w0,
        valid,
    })
}
