//! Error types shared across the toolkit.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for geometry, simulation, beamforming, and metrics.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Field point on or behind the array plane; delays are undefined there.
    #[error("field point ({x_m} m, {z_m} m) must have positive axial coordinate")]
    FieldPointBehindArray { x_m: f64, z_m: f64 },

    /// Grid decimation must divide the native 512-pixel extent.
    #[error("grid decimation {0} does not divide 512")]
    BadDecimation(u32),

    /// Emission and frame sample rates must agree before propagation.
    #[error("sample rate mismatch: emission {emission_hz} Hz vs frame {frame_hz} Hz")]
    SampleRateMismatch { emission_hz: f64, frame_hz: f64 },

    /// The bubble-dynamics integrator failed to advance the solution.
    #[error(
        "bubble simulation diverged (R0 = {r0_m} m, peak pressure = {pressure_pa} Pa, \
         drive frequency = {freq_hz} Hz): {detail}"
    )]
    SimulationDiverged {
        r0_m: f64,
        pressure_pa: f64,
        freq_hz: f64,
        detail: String,
    },

    /// Noise injection is undefined for an all-zero frame.
    #[error("cannot set SNR: frame has zero signal power")]
    CannotSetSnr,

    /// The steering uncertainty must satisfy 0 < eps < N.
    #[error("infeasible steering uncertainty eps = {eps} for {n} elements")]
    InfeasibleEpsilon { eps: f64, n: usize },

    /// The l-infinity weight problem has no feasible point.
    #[error("beamformer constraint infeasible: {0}")]
    InfeasibleConstraint(String),

    /// An iterative solver exhausted its budget or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A per-pixel reconstruction failure, annotated with pixel coordinates.
    #[error("pixel ({ix}, {iz}) at ({x_m} m, {z_m} m): {source}")]
    PixelFailed {
        ix: usize,
        iz: usize,
        x_m: f64,
        z_m: f64,
        #[source]
        source: Box<Error>,
    },

    /// A metric is undefined for the given map (all-zero or empty region).
    #[error("metric undefined: {0}")]
    DegenerateMap(String),
}
