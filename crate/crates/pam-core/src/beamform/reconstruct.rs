//! Full-grid energy map reconstruction.
//!
//! Every pixel is an independent delay-stack / weight / energy evaluation,
//! so the grid is processed with rayon and collected back in index order.
//! Maps are bitwise identical for any worker count: no pixel reads another
//! pixel's state and the reduction is a plain ordered collect.

use super::dax::dax_factor;
use super::energy::pixel_energy;
use super::rcb::{project_dominant, rcb_from_eig, rcb_weights};
use super::rlpb::rlpb_weights;
use super::stack::delay_stack;
use super::{eig::sym_eig, tea_weights, BeamformParams, Method, Weights};
use crate::arrays::{build_array, ArrayGeometry, ImagingGrid};
use crate::beamform::covariance::sample_covariance;
use crate::cavsim::RFFrame;
use crate::error::{Error, Result};
use ndarray::Array2;
use rayon::prelude::*;

/// Cavitation energy on an imaging grid; `values[[iz, ix]]` maps to lateral
/// position `grid.pixel_x(ix)` and depth `grid.pixel_z(iz)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMap {
    pub grid: ImagingGrid,
    pub values: Array2<f64>,
    pub method: Method,
}

impl EnergyMap {
    pub fn nx(&self) -> usize {
        self.values.ncols()
    }

    pub fn nz(&self) -> usize {
        self.values.nrows()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v))
    }

    /// Indices (iz, ix) of the largest value, first hit in row-major order.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = f64::NEG_INFINITY;
        let mut at = (0, 0);
        for (idx, &v) in self.values.indexed_iter() {
            if v > best {
                best = v;
                at = idx;
            }
        }
        at
    }
}

pub fn reconstruct(
    rf: &RFFrame,
    grid: &ImagingGrid,
    method: Method,
    params: &BeamformParams,
) -> Result<EnergyMap> {
    params.validate()?;
    let geom = build_array(rf.model);
    if rf.n_channels() != geom.n_elements {
        return Err(Error::InvalidParameter(format!(
            "frame carries {} channels but a {} array has {} elements",
            rf.n_channels(),
            geom.model,
            geom.n_elements
        )));
    }
    // Fail fast on a bad steering vector instead of once per pixel.
    params.steering_for(geom.n_elements)?;

    let nx = grid.nx;
    let nz = grid.nz;
    let pixels: Vec<Result<f64>> = (0..nx * nz)
        .into_par_iter()
        .map(|flat| {
            let iz = flat / nx;
            let ix = flat % nx;
            pixel_value(rf, &geom, grid, method, params, ix, iz)
        })
        .collect();

    let mut values = Array2::zeros((nz, nx));
    for (flat, value) in pixels.into_iter().enumerate() {
        let iz = flat / nx;
        let ix = flat % nx;
        match value {
            Ok(v) => values[[iz, ix]] = v,
            Err(source) => {
                return Err(Error::PixelFailed {
                    ix,
                    iz,
                    x_m: grid.pixel_x(ix),
                    z_m: grid.pixel_z(iz),
                    source: Box::new(source),
                })
            }
        }
    }
    Ok(EnergyMap {
        grid: *grid,
        values,
        method,
    })
}

fn pixel_value(
    rf: &RFFrame,
    geom: &ArrayGeometry,
    grid: &ImagingGrid,
    method: Method,
    params: &BeamformParams,
    ix: usize,
    iz: usize,
) -> Result<f64> {
    let r = [grid.pixel_x(ix), grid.pixel_z(iz)];
    let stack = delay_stack(rf, r, geom, &rf.medium, params.window)?;
    let medium = &rf.medium;
    match method {
        Method::Tea => pixel_energy(&tea_weights(stack.n_channels())?, &stack, medium),
        Method::Rcb => {
            let cov = sample_covariance(&stack);
            let w = rcb_weights(&cov, params)?;
            pixel_energy(&w, &stack, medium)
        }
        Method::Eisrcb => {
            // One eigendecomposition serves both the Capon solve and the
            // signal-subspace projection.
            let cov = sample_covariance(&stack);
            let eig = sym_eig(&cov.r)?;
            let abar = params.steering_for(stack.n_channels())?;
            let sol = rcb_from_eig(&eig, &abar, params.eps)?;
            let w = Weights {
                w: project_dominant(&eig, &sol.weights, params.delta),
                method: Method::Eisrcb,
            };
            pixel_energy(&w, &stack, medium)
        }
        Method::DaxRcb => {
            let cov = sample_covariance(&stack);
            let w = rcb_weights(&cov, params)?;
            let energy = pixel_energy(&w, &stack, medium)?;
            Ok(energy * dax_factor(&stack, params)?)
        }
        Method::Rlpb => {
            let w = rlpb_weights(&stack, params)?;
            pixel_energy(&w, &stack, medium)
        }
    }
}
