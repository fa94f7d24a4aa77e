//! Passive acoustic mapping toolkit.
//!
//! Synthesizes array RF data from simulated cavitation bubble clouds and
//! reconstructs cavitation energy maps with a family of beamformers, plus
//! the metrics and cost models used to compare them.
//!
//! Pipeline: [`cavsim`] turns a seeded acquisition protocol into per-channel
//! RF frames; [`beamform`] turns a frame into an energy map over an
//! [`arrays::ImagingGrid`]; [`metrics`] scores maps against ground truth;
//! [`bench`] counts and times the work.

pub mod arrays;
pub mod bench;
pub mod beamform;
pub mod cavsim;
pub mod error;
pub mod metrics;
pub mod rng;

pub use arrays::{build_array, build_grid, ArrayGeometry, ArrayModel, ImagingGrid, Medium};
pub use error::{Error, Result};
