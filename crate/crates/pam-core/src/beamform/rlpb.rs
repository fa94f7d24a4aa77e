//! Robust l-infinity linear-programming beamformer.
//!
//! Minimizes the worst-case snapshot output max_k |s_k' w| subject to a
//! distortionless-response constraint softened by an l-infinity penalty:
//! abar' w - tau * ||w||_inf >= 1. The primal has N + 2 unknowns but
//! 2 T_s + 2 N + 1 inequality rows, so the LP dual, which has only N + 2
//! rows, is solved instead; the primal weights are read off the simplex
//! multipliers and certified against the dual objective before returning.

use super::simplex::{solve_max, LpOutcome, SimplexProblem, WarmBasis};
use super::stack::DelayedStack;
use super::{BeamformParams, Method, Weights};
use crate::error::{Error, Result};
use ndarray::{Array1, Array2};

/// Relative slack allowed between the recovered primal objective and the
/// dual optimum before the solve is declared unsound.
const DUALITY_GAP_TOL: f64 = 1e-6;

/// Snapshot time indices used in the LP: an even stride over the valid
/// prefix, capped at `cap` columns so the program stays desk-sized.
pub(crate) fn snapshot_indices(valid: usize, cap: usize) -> Vec<usize> {
    let ts = valid.min(cap.max(1));
    (0..ts).map(|k| k * valid / ts).collect()
}

pub fn rlpb_weights(stack: &DelayedStack, params: &BeamformParams) -> Result<Weights> {
    params.validate()?;
    let n = stack.n_channels();
    let abar = params.steering_for(n)?;
    let tau = params.tau;

    let picks = snapshot_indices(stack.valid, params.rlpb_max_snapshots);
    let scale = picks
        .iter()
        .flat_map(|&t| stack.s.column(t))
        .fold(0.0f64, |a, &v| a.max(v.abs()));
    if picks.is_empty() || scale == 0.0 {
        // No energy reaches the pixel: every w scores zero, so return the
        // cheapest vector that meets the steering constraint with equality.
        return fallback_weights(&abar, tau);
    }

    let ts = picks.len();
    let m = n + 2;
    let n_cols = 2 * ts + 2 * n + 3;
    let mut cols = Array2::zeros((m, n_cols));
    for (k, &t) in picks.iter().enumerate() {
        for j in 0..n {
            let v = stack.s[[j, t]] / scale;
            cols[[j, k]] = v;
            cols[[j, ts + k]] = -v;
        }
        cols[[n, k]] = 1.0;
        cols[[n, ts + k]] = 1.0;
    }
    for j in 0..n {
        cols[[j, 2 * ts + j]] = 1.0;
        cols[[n + 1, 2 * ts + j]] = 1.0;
        cols[[j, 2 * ts + n + j]] = -1.0;
        cols[[n + 1, 2 * ts + n + j]] = 1.0;
    }
    let mu_col = 2 * ts + 2 * n;
    for j in 0..n {
        cols[[j, mu_col]] = -abar[j];
    }
    cols[[n + 1, mu_col]] = -tau;
    cols[[n, mu_col + 1]] = 1.0;
    cols[[n + 1, mu_col + 2]] = 1.0;

    let mut b = Array1::zeros(m);
    b[n] = 1.0;
    let mut c = Array1::zeros(n_cols);
    c[mu_col] = 1.0;

    // Starting basis {beta+_0..beta+_{n-1}, s1, s2}: B is identity except
    // for a row of ones under the beta columns, so B^-1 is identity with
    // that row negated, and x_B = (0,...,0,1,0) is feasible.
    let mut binv = Array2::eye(m);
    for j in 0..n {
        binv[[n + 1, j]] = -1.0;
    }
    let mut basis: Vec<usize> = (2 * ts..2 * ts + n).collect();
    basis.push(mu_col + 1);
    basis.push(mu_col + 2);

    let sol = match solve_max(&SimplexProblem { cols: &cols, b: &b, c: &c }, WarmBasis { basis, binv })? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Unbounded { .. } => {
            return Err(Error::InfeasibleConstraint(
                "steering gain does not dominate the l-infinity penalty; \
                 the distortionless constraint admits no weight vector"
                    .into(),
            ))
        }
    };

    // The dual columns are the primal constraints, so the multipliers carry
    // the primal solution: w = -y[0..n], t* = y[n], u* = y[n+1].
    let mut w: Array1<f64> = (0..n).map(|j| -sol.y[j]).collect();

    let worst = picks
        .iter()
        .map(|&t| {
            let dot: f64 = (0..n).map(|j| w[j] * stack.s[[j, t]] / scale).sum();
            dot.abs()
        })
        .fold(0.0f64, f64::max);
    if (worst - sol.objective).abs() > DUALITY_GAP_TOL * sol.objective.max(1.0) {
        return Err(Error::Numerical(format!(
            "l-infinity beamformer failed certification: primal objective \
             {worst:.6e} vs dual optimum {:.6e}",
            sol.objective
        )));
    }

    let linf = w.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let gain = abar.dot(&w) - tau * linf;
    if gain < 1.0 - 1e-8 {
        if gain <= 0.5 {
            return Err(Error::Numerical(format!(
                "l-infinity beamformer lost the steering constraint: \
                 residual gain {gain:.6e}"
            )));
        }
        // Mild constraint slack from finite pricing tolerances; rescaling
        // restores equality without disturbing the objective materially.
        w.mapv_inplace(|v| v / gain);
    }

    Ok(Weights {
        w,
        method: Method::Rlpb,
    })
}

/// Scaled steering vector meeting abar' w - tau ||w||_inf = 1 exactly; used
/// when the window carries no snapshots so every weight scores zero.
fn fallback_weights(abar: &Array1<f64>, tau: f64) -> Result<Weights> {
    let linf = abar.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let denom = abar.dot(abar) - tau * linf;
    if denom <= 0.0 {
        return Err(Error::InfeasibleConstraint(
            "steering gain does not dominate the l-infinity penalty; \
             the distortionless constraint admits no weight vector"
                .into(),
        ));
    }
    Ok(Weights {
        w: abar.mapv(|v| v / denom),
        method: Method::Rlpb,
    })
}
