//! Robust Capon weights and their eigenspace-projected variant.
//!
//! The robust problem min_a a^T R^{-1} a subject to ||a - abar||^2 <= eps
//! is solved in the eigenbasis of R: with z = U^T abar, the Lagrange
//! multiplier lambda satisfies sum_i z_i^2 / (1 + lambda g_i)^2 = eps,
//! a monotone equation solved by safeguarded Newton inside the standard
//! bracket [(||abar||/sqrt(eps) - 1)/g_max, (||abar||/sqrt(eps) - 1)/g_min].

use super::covariance::CovMatrix;
use super::eig::{sym_eig, SymEig};
use super::{BeamformParams, Method, Weights};
use crate::error::{Error, Result};
use ndarray::Array1;

/// Condition number beyond which diagonal loading kicks in.
const COND_LIMIT: f64 = 1e12;
/// Loading level relative to the mean eigenvalue.
const LOADING_FACTOR: f64 = 1e-8;
/// Relative tolerance on the constraint equation.
const ROOT_TOL: f64 = 1e-10;
/// Iteration budget for the multiplier solve.
const MAX_ITER: u32 = 200;

/// Everything the robust Capon solve produces for one pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct RcbSolution {
    /// Final weights w = R^{-1} a_hat / (a_hat^T R^{-1} a_hat).
    pub weights: Array1<f64>,
    /// Steered vector estimate before the norm rescale; the eps-ball
    /// feasibility guarantee applies to this vector.
    pub a_hat_prescale: Array1<f64>,
    /// Lagrange multiplier of the uncertainty constraint.
    pub lambda: f64,
    /// Newton iterations spent on the multiplier.
    pub iterations: u32,
    /// Objective value a^T R^{-1} a at the prescale estimate.
    pub objective: f64,
}

/// Eigenvalues after conditional diagonal loading. Loading a symmetric
/// matrix shifts every eigenvalue by the load and keeps the eigenvectors,
/// so it is applied directly in eigenvalue space.
fn loaded_eigenvalues(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let gmax = values[n - 1];
    let gmin = values[0];
    if gmin > 0.0 && gmax / gmin <= COND_LIMIT {
        return values.to_vec();
    }
    let trace: f64 = values.iter().sum();
    let load = LOADING_FACTOR * trace / n as f64;
    values.iter().map(|g| g + load).collect()
}

/// Robust Capon solve given a precomputed eigendecomposition.
pub(crate) fn rcb_from_eig(
    eig: &SymEig,
    abar: &Array1<f64>,
    eps: f64,
) -> Result<RcbSolution> {
    let n = abar.len();
    let abar_norm_sq = abar.dot(abar);
    if !(eps < abar_norm_sq) {
        return Err(Error::InfeasibleEpsilon { eps, n });
    }

    let gmax = *eig.values.last().expect("nonempty spectrum");
    if gmax <= 0.0 {
        // Zero covariance: the window carries no signal, every weight gives
        // zero output power. Return the uniform direction for a stable map.
        return Ok(RcbSolution {
            weights: abar / abar_norm_sq,
            a_hat_prescale: abar.clone(),
            lambda: 0.0,
            iterations: 0,
            objective: 0.0,
        });
    }

    let gamma = loaded_eigenvalues(&eig.values);
    let z = eig.vectors.t().dot(abar);

    // g(lambda) = sum z_i^2 / (1 + lambda gamma_i)^2 - eps, strictly
    // decreasing from ||abar||^2 - eps > 0 toward -eps as lambda grows.
    let residual = |lambda: f64| -> (f64, f64) {
        let mut g = -eps;
        let mut dg = 0.0;
        for (zi, gi) in z.iter().zip(&gamma) {
            let den = 1.0 + lambda * gi;
            let q = zi / den;
            g += q * q;
            dg += -2.0 * q * q * gi / den;
        }
        (g, dg)
    };

    let reach = abar_norm_sq.sqrt() / eps.sqrt() - 1.0;
    let mut lo = (reach / gamma[gamma.len() - 1]).max(0.0);
    let mut hi = reach / gamma[0];
    let mut lambda = lo;
    let tol = ROOT_TOL * eps;
    let mut iterations = 0;
    loop {
        let (g, dg) = residual(lambda);
        if g.abs() <= tol {
            break;
        }
        if iterations >= MAX_ITER {
            return Err(Error::Numerical(format!(
                "robust Capon multiplier failed to converge (residual {g:.3e})"
            )));
        }
        iterations += 1;
        if g > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        let newton = lambda - g / dg;
        lambda = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi.max(1.0) {
            break;
        }
    }

    // a_hat - abar in the eigenbasis is -z_i/(1 + lambda g_i), so the
    // constraint residual equals g(lambda) + eps by construction.
    let coeff: Vec<f64> = z
        .iter()
        .zip(&gamma)
        .map(|(zi, gi)| zi * lambda * gi / (1.0 + lambda * gi))
        .collect();
    let coeff = Array1::from_vec(coeff);
    let a_hat_prescale = eig.vectors.dot(&coeff);
    let objective = coeff
        .iter()
        .zip(&gamma)
        .map(|(c, g)| c * c / g)
        .sum::<f64>();

    let scale = abar_norm_sq.sqrt() / coeff.dot(&coeff).sqrt();
    let y = &coeff * scale;

    // w = R^{-1} a_hat / (a_hat^T R^{-1} a_hat), all in the eigenbasis.
    let ry: Array1<f64> = y
        .iter()
        .zip(&gamma)
        .map(|(yi, gi)| yi / gi)
        .collect();
    let denom: f64 = y.iter().zip(&ry).map(|(a, b)| a * b).sum();
    let weights = eig.vectors.dot(&ry) / denom;

    Ok(RcbSolution {
        weights,
        a_hat_prescale,
        lambda,
        iterations,
        objective,
    })
}

/// Full robust Capon solve for one covariance matrix.
pub fn rcb_solution(cov: &CovMatrix, params: &BeamformParams) -> Result<RcbSolution> {
    params.validate()?;
    let abar = params.steering_for(cov.n())?;
    let eig = sym_eig(&cov.r)?;
    rcb_from_eig(&eig, &abar, params.eps)
}

/// Robust Capon weights (Weights-typed wrapper over [`rcb_solution`]).
pub fn rcb_weights(cov: &CovMatrix, params: &BeamformParams) -> Result<Weights> {
    Ok(Weights {
        w: rcb_solution(cov, params)?.weights,
        method: Method::Rcb,
    })
}

/// Projects weights onto the span of eigenvectors whose eigenvalues reach
/// `delta * g_max`.
pub(crate) fn project_dominant(
    eig: &SymEig,
    w: &Array1<f64>,
    delta: f64,
) -> Array1<f64> {
    let n = w.len();
    let gmax = *eig.values.last().expect("nonempty spectrum");
    let cutoff = delta * gmax;
    let mut out = Array1::zeros(n);
    for (i, &g) in eig.values.iter().enumerate() {
        if g >= cutoff {
            let u = eig.vectors.column(i);
            let c = u.dot(w);
            out.scaled_add(c, &u);
        }
    }
    out
}

/// Eigenspace-projected robust Capon weights: w = U_s U_s^T w_rcb with the
/// signal subspace spanned by eigenvectors at or above delta * g_max.
pub fn eisrcb_weights(
    cov: &CovMatrix,
    w_rcb: &Weights,
    params: &BeamformParams,
) -> Result<Weights> {
    params.validate()?;
    if w_rcb.w.len() != cov.n() {
        return Err(Error::InvalidParameter(format!(
            "weight length {} does not match covariance size {}",
            w_rcb.w.len(),
            cov.n()
        )));
    }
    let eig = sym_eig(&cov.r)?;
    Ok(Weights {
        w: project_dominant(&eig, &w_rcb.w, params.delta),
        method: Method::Eisrcb,
    })
}

/// Output power a^T R^{-1} a evaluated through the eigendecomposition;
/// test helper shared with the oracle suite.
pub fn quadratic_inverse_form(cov: &CovMatrix, a: &Array1<f64>) -> Result<f64> {
    let eig = sym_eig(&cov.r)?;
    let gamma = loaded_eigenvalues(&eig.values);
    let z = eig.vectors.t().dot(a);
    Ok(z.iter().zip(&gamma).map(|(zi, gi)| zi * zi / gi).sum())
}
