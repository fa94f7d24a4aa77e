//! Dual-apodization cross-correlation factor.
//!
//! The aperture is split into even- and odd-indexed halves, each half is
//! beamformed with its own robust Capon weights, and the normalized
//! correlation of the two beam signals gates the pixel energy: coherent
//! mainlobe signal correlates, incoherent clutter does not.

use super::covariance::sample_covariance;
use super::rcb::rcb_from_eig;
use super::stack::DelayedStack;
use super::{eig::sym_eig, BeamformParams};
use crate::error::{Error, Result};
use ndarray::{Array1, Axis};

/// Correlation factor in [dax_floor, 1] for one pixel.
pub fn dax_factor(stack: &DelayedStack, params: &BeamformParams) -> Result<f64> {
    params.validate()?;
    let n = stack.n_channels();
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "dual apodization needs at least 4 channels, got {n}"
        )));
    }
    let abar = params.steering_for(n)?;
    let even: Vec<usize> = (0..n).step_by(2).collect();
    let odd: Vec<usize> = (1..n).step_by(2).collect();
    let y1 = sub_beam(stack, &abar, params.eps, &even)?;
    let y2 = sub_beam(stack, &abar, params.eps, &odd)?;
    Ok(correlation(&y1, &y2, stack.valid, stack.n_snapshots())
        .map_or(params.dax_floor, |rho| {
            rho.clamp(params.dax_floor, 1.0)
        }))
}

/// Beamforms one sub-aperture with its own RCB weights; returns the beam
/// signal over the valid snapshot prefix (the tail is identically zero).
fn sub_beam(
    stack: &DelayedStack,
    abar: &Array1<f64>,
    eps: f64,
    rows: &[usize],
) -> Result<Vec<f64>> {
    let sub = DelayedStack {
        s: stack.s.select(Axis(0), rows),
        dt: stack.dt,
        window_start: stack.window_start,
        valid: stack.valid,
    };
    let sub_abar: Array1<f64> = rows.iter().map(|&j| abar[j]).collect();
    if !(eps < sub_abar.dot(&sub_abar)) {
        return Err(Error::InfeasibleEpsilon {
            eps,
            n: rows.len(),
        });
    }
    let cov = sample_covariance(&sub);
    let eig = sym_eig(&cov.r)?;
    let sol = rcb_from_eig(&eig, &sub_abar, eps)?;
    let mut y = vec![0.0; sub.valid];
    for (j, &wj) in sol.weights.iter().enumerate() {
        let row = sub.s.row(j);
        for (t, acc) in y.iter_mut().enumerate() {
            *acc += wj * row[t];
        }
    }
    Ok(y)
}

/// Pearson correlation of two beam signals over the full window of length
/// `total`, where only the first `filled` samples are stored (the rest are
/// zero). The zero tail enters through closed-form corrections. Returns
/// None when either signal has zero variance.
fn correlation(y1: &[f64], y2: &[f64], filled: usize, total: usize) -> Option<f64> {
    debug_assert!(y1.len() == filled && y2.len() == filled && filled <= total);
    if total == 0 {
        return None;
    }
    let m1 = y1.iter().sum::<f64>() / total as f64;
    let m2 = y2.iter().sum::<f64>() / total as f64;
    let tail = (total - filled) as f64;
    let mut cov = tail * m1 * m2;
    let mut var1 = tail * m1 * m1;
    let mut var2 = tail * m2 * m2;
    for (a, b) in y1.iter().zip(y2) {
        let da = a - m1;
        let db = b - m2;
        cov += da * db;
        var1 += da * da;
        var2 += db * db;
    }
    if var1 > 0.0 && var2 > 0.0 {
        Some(cov / (var1 * var2).sqrt())
    } else {
        None
    }
}
