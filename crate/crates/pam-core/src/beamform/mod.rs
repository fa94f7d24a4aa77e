//! Energy-map reconstruction: per-pixel delay stacks, channel covariance,
//! and the five weighting strategies (TEA, RCB, EISRCB, DAX-RCB, RLPB).
//!
//! Every weight solver is a pure single-pixel function; [`reconstruct`]
//! fans them out over the imaging grid.

pub mod covariance;
pub mod dax;
pub mod eig;
pub mod energy;
pub mod rcb;
pub mod reconstruct;
pub mod rlpb;
pub mod simplex;
pub mod stack;

pub use covariance::{sample_covariance, CovMatrix};
pub use dax::dax_factor;
pub use energy::pixel_energy;
pub use rcb::{eisrcb_weights, rcb_solution, rcb_weights, RcbSolution};
pub use reconstruct::{reconstruct, EnergyMap};
pub use rlpb::rlpb_weights;
pub use stack::{delay_stack, DelayedStack};

use crate::error::{Error, Result};
use ndarray::Array1;

/// Beamforming method ladder, cheapest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Delay-and-sum energy with uniform weights.
    Tea,
    /// Robust Capon beamformer (steering uncertainty ball of size eps).
    Rcb,
    /// RCB weights projected onto the dominant eigen-subspace.
    Eisrcb,
    /// Full-aperture RCB energy scaled by a dual-apodization
    /// cross-correlation factor.
    DaxRcb,
    /// Minimax (l-infinity) linear-programming beamformer.
    Rlpb,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Tea,
        Method::Rcb,
        Method::Eisrcb,
        Method::DaxRcb,
        Method::Rlpb,
    ];

    /// Stable numeric tag used in map file headers.
    #[must_use]
    pub fn tag(self) -> u32 {
        match self {
            Method::Tea => 0,
            Method::Rcb => 1,
            Method::Eisrcb => 2,
            Method::DaxRcb => 3,
            Method::Rlpb => 4,
        }
    }

    pub fn from_tag(tag: u32) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == tag)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method tag {tag}")))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Tea => "tea",
            Method::Rcb => "rcb",
            Method::Eisrcb => "eisrcb",
            Method::DaxRcb => "daxrcb",
            Method::Rlpb => "rlpb",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tea" => Ok(Method::Tea),
            "rcb" => Ok(Method::Rcb),
            "eisrcb" => Ok(Method::Eisrcb),
            "daxrcb" | "dax-rcb" | "dax_rcb" => Ok(Method::DaxRcb),
            "rlpb" => Ok(Method::Rlpb),
            other => Err(Error::InvalidParameter(format!(
                "unknown method '{other}' (expected tea, rcb, eisrcb, daxrcb or rlpb)"
            ))),
        }
    }
}

/// Per-pixel channel weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub w: Array1<f64>,
    pub method: Method,
}

/// Solver settings shared by all methods.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformParams {
    /// Steering uncertainty ball size (RCB family); must be < N at solve time.
    pub eps: f64,
    /// Eigen-subspace threshold: keep eigenvalues >= delta * max (EISRCB).
    pub delta: f64,
    /// Weight-norm penalty in the RLPB steering constraint.
    pub tau: f64,
    /// Lower clamp for the DAX correlation factor.
    pub dax_floor: f64,
    /// Per-pixel snapshot cap for the RLPB linear program.
    pub rlpb_max_snapshots: usize,
    /// Integration window (start, length) in samples; None = full trace.
    pub window: Option<(usize, usize)>,
    /// Assumed steering vector; None = all-ones (distance compensation is
    /// already folded into the delay stack).
    pub steering: Option<Vec<f64>>,
}

impl Default for BeamformParams {
    fn default() -> Self {
        BeamformParams {
            eps: 20.0,
            delta: 0.5,
            tau: 0.1,
            dax_floor: 0.001,
            rlpb_max_snapshots: 128,
            window: None,
            steering: None,
        }
    }
}

impl BeamformParams {
    /// Defaults tuned by expected source count: eps = 20 for single-source
    /// runs, 30 when resolving multiple sources.
    pub fn for_sources(n_sources: u8) -> Self {
        BeamformParams {
            eps: if n_sources >= 2 { 30.0 } else { 20.0 },
            ..BeamformParams::default()
        }
    }

    /// Checks the parameter ranges that do not depend on the channel count.
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1], got {}",
                self.delta
            )));
        }
        if !(self.tau >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be nonnegative, got {}",
                self.tau
            )));
        }
        if !(self.dax_floor > 0.0 && self.dax_floor < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dax_floor must lie in (0, 1), got {}",
                self.dax_floor
            )));
        }
        if self.rlpb_max_snapshots == 0 {
            return Err(Error::InvalidParameter(
                "rlpb_max_snapshots must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// The assumed steering vector for an N-channel array.
    pub(crate) fn steering_for(&self, n: usize) -> Result<Array1<f64>> {
        match &self.steering {
            None => Ok(Array1::ones(n)),
            Some(a) if a.len() == n => Ok(Array1::from_vec(a.clone())),
            Some(a) => Err(Error::InvalidParameter(format!(
                "steering vector has {} entries for {} channels",
                a.len(),
                n
            ))),
        }
    }
}

/// Uniform delay-and-sum weights: w_j = 1/n.
pub fn tea_weights(n: usize) -> Result<Weights> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "channel count must be at least 1".into(),
        ));
    }
    Ok(Weights {
        w: Array1::from_elem(n, 1.0 / n as f64),
        method: Method::Tea,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_tags_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::from_tag(m.tag()).unwrap(), m);
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!(Method::from_tag(9).is_err());
        assert!("mvdr".parse::<Method>().is_err());
    }

    #[test]
    fn dax_name_variants_parse() {
        assert_eq!("dax-rcb".parse::<Method>().unwrap(), Method::DaxRcb);
        assert_eq!("DAXRCB".parse::<Method>().unwrap(), Method::DaxRcb);
    }

    #[test]
    fn tea_weights_are_uniform_and_normalized() {
        let w = tea_weights(96).unwrap();
        assert!(w.w.iter().all(|&v| v == 1.0 / 96.0));
        assert_eq!(w.w.sum(), 1.0);
        assert_eq!(tea_weights(1).unwrap().w.to_vec(), vec![1.0]);
        assert!(tea_weights(0).is_err());
    }

    #[test]
    fn params_validation_catches_bad_ranges() {
        assert!(BeamformParams::default().validate().is_ok());
        for bad in [
            BeamformParams {
                eps: 0.0,
                ..Default::default()
            },
            BeamformParams {
                delta: 1.5,
                ..Default::default()
            },
            BeamformParams {
                tau: -0.1,
                ..Default::default()
            },
            BeamformParams {
                dax_floor: 1.0,
                ..Default::default()
            },
            BeamformParams {
                rlpb_max_snapshots: 0,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn source_count_selects_eps() {
        assert_eq!(BeamformParams::for_sources(1).eps, 20.0);
        assert_eq!(BeamformParams::for_sources(2).eps, 30.0);
    }
}
