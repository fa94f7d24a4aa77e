//! Transducer array geometry, acoustic medium, and imaging grids.
//!
//! The coordinate frame places the array on the z = 0 plane with the aperture
//! centered on the origin and z increasing into the medium. Element centers
//! are uniformly pitched along x; all quantities are SI (meters, seconds, Hz).

use crate::error::{Error, Result};

/// Supported linear/phased array models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArrayModel {
    /// 96-element 2.5 MHz phased array, 28.8 mm aperture, 80% bandwidth.
    P41,
    /// 128-element 5 MHz linear array, 38.4 mm aperture, 60% bandwidth.
    L74,
    /// 128-element 9 MHz linear array, 25.6 mm aperture, 60% bandwidth.
    Cl157,
}

impl ArrayModel {
    /// All models, in file-format tag order.
    pub const ALL: [ArrayModel; 3] = [ArrayModel::P41, ArrayModel::L74, ArrayModel::Cl157];

    /// Stable numeric tag used by the binary file formats.
    #[must_use]
    pub fn tag(self) -> u32 {
        match self {
            ArrayModel::P41 => 0,
            ArrayModel::L74 => 1,
            ArrayModel::Cl157 => 2,
        }
    }

    /// Inverse of [`ArrayModel::tag`].
    pub fn from_tag(tag: u32) -> Result<Self> {
        match tag {
            0 => Ok(ArrayModel::P41),
            1 => Ok(ArrayModel::L74),
            2 => Ok(ArrayModel::Cl157),
            other => Err(Error::InvalidParameter(format!(
                "unknown array model tag {other}"
            ))),
        }
    }
}

impl std::fmt::Display for ArrayModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ArrayModel::P41 => "p4-1",
            ArrayModel::L74 => "l7-4",
            ArrayModel::Cl157 => "cl15-7",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for ArrayModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "p4-1" => Ok(ArrayModel::P41),
            "l7-4" => Ok(ArrayModel::L74),
            "cl15-7" => Ok(ArrayModel::Cl157),
            other => Err(Error::InvalidParameter(format!(
                "unknown array model '{other}' (expected p4-1, l7-4, or cl15-7)"
            ))),
        }
    }
}

/// Homogeneous acoustic medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    /// Speed of sound, m/s.
    pub sos: f64,
    /// Mass density, kg/m^3.
    pub density: f64,
}

impl Medium {
    /// Validates the physical range: 1400 <= sos <= 1700 m/s, density > 0.
    pub fn new(sos: f64, density: f64) -> Result<Self> {
        if !(1400.0..=1700.0).contains(&sos) {
            return Err(Error::InvalidParameter(format!(
                "speed of sound {sos} m/s outside [1400, 1700]"
            )));
        }
        if !(density > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "density {density} kg/m^3 must be positive"
            )));
        }
        Ok(Medium { sos, density })
    }

    /// Water-like default: 1540 m/s, 1000 kg/m^3.
    #[must_use]
    pub fn water() -> Self {
        Medium {
            sos: 1540.0,
            density: 1000.0,
        }
    }
}

/// A uniform linear array on z = 0, centered on the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub model: ArrayModel,
    pub n_elements: usize,
    /// Element pitch, m (aperture / n_elements).
    pub pitch: f64,
    /// Total aperture, m.
    pub aperture: f64,
    /// Element center x-coordinates, m; symmetric about 0.
    pub element_x: Vec<f64>,
    /// Center frequency, Hz.
    pub center_freq: f64,
    /// Fractional -6 dB bandwidth (0..1).
    pub bandwidth_frac: f64,
    /// Acquisition sample rate, Hz.
    pub sample_rate: f64,
}

struct ModelSpec {
    n: usize,
    aperture: f64,
    fc: f64,
    bw: f64,
    fs: f64,
    /// Native lateral pixel size (pitch / 4), m.
    dx: f64,
    /// Native axial pixel size, m.
    dz: f64,
    /// Start of the axial imaging range, m.
    z_start: f64,
}

fn model_spec(model: ArrayModel) -> ModelSpec {
    match model {
        ArrayModel::P41 => ModelSpec {
            n: 96,
            aperture: 28.8e-3,
            fc: 2.5e6,
            bw: 0.80,
            fs: 20.08e6,
            dx: 0.075e-3,
            dz: 0.2e-3,
            z_start: 0.0,
        },
        ArrayModel::L74 => ModelSpec {
            n: 128,
            aperture: 38.4e-3,
            fc: 5.0e6,
            bw: 0.60,
            fs: 20.90e6,
            dx: 0.075e-3,
            dz: 0.1e-3,
            z_start: 15.0e-3,
        },
        ArrayModel::Cl157 => ModelSpec {
            n: 128,
            aperture: 25.6e-3,
            fc: 9.0e6,
            bw: 0.60,
            fs: 35.6e6,
            dx: 0.05e-3,
            dz: 0.08e-3,
            z_start: 10.0e-3,
        },
    }
}

/// Constructs the geometry for a given model.
///
/// Element j sits at (j - (n-1)/2) * pitch, which makes the layout symmetric
/// about x = 0 to the last bit: mirrored indices produce exactly negated
/// coordinates.
#[must_use]
pub fn build_array(model: ArrayModel) -> ArrayGeometry {
    let spec = model_spec(model);
    let pitch = spec.aperture / spec.n as f64;
    let half = (spec.n - 1) as f64 / 2.0;
    let element_x = (0..spec.n).map(|j| (j as f64 - half) * pitch).collect();
    let geom = ArrayGeometry {
        model,
        n_elements: spec.n,
        pitch,
        aperture: spec.aperture,
        element_x,
        center_freq: spec.fc,
        bandwidth_frac: spec.bw,
        sample_rate: spec.fs,
    };
    debug_assert!(geom.sample_rate > 2.0 * geom.center_freq * (1.0 + geom.bandwidth_frac / 2.0));
    geom
}

impl ArrayGeometry {
    /// Nominal wavelength at the center frequency for a given sound speed, m.
    #[must_use]
    pub fn wavelength(&self, sos: f64) -> f64 {
        sos / self.center_freq
    }
}

/// Distance (m) and propagation delay (s) from field point `r = (x, z)` to
/// element `j`.
///
/// Errors if the point is not strictly in front of the array (z <= 0).
pub fn element_path(
    geom: &ArrayGeometry,
    medium: &Medium,
    r: [f64; 2],
    j: usize,
) -> Result<(f64, f64)> {
    if !(r[1] > 0.0) {
        return Err(Error::FieldPointBehindArray {
            x_m: r[0],
            z_m: r[1],
        });
    }
    let dx = r[0] - geom.element_x[j];
    let dz = r[1];
    let dist = (dx * dx + dz * dz).sqrt();
    Ok((dist, dist / medium.sos))
}

/// Distances and delays from `r` to every element, in element order.
pub fn element_paths(geom: &ArrayGeometry, medium: &Medium, r: [f64; 2]) -> Result<Vec<(f64, f64)>> {
    (0..geom.n_elements)
        .map(|j| element_path(geom, medium, r, j))
        .collect()
}

/// Rectangular imaging grid. `values[iz][ix]` maps to the pixel centered at
/// (x0 + ix * dx, z0 + iz * dz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagingGrid {
    /// x-coordinate of the first pixel center, m.
    pub x0: f64,
    /// z-coordinate of the first pixel center, m.
    pub z0: f64,
    pub nx: usize,
    pub nz: usize,
    /// Lateral pixel size, m.
    pub dx: f64,
    /// Axial pixel size, m.
    pub dz: f64,
}

impl ImagingGrid {
    /// Center x of pixel column `ix`, m.
    #[must_use]
    pub fn pixel_x(&self, ix: usize) -> f64 {
        self.x0 + ix as f64 * self.dx
    }

    /// Center z of pixel row `iz`, m.
    #[must_use]
    pub fn pixel_z(&self, iz: usize) -> f64 {
        self.z0 + iz as f64 * self.dz
    }

    /// Total pixel count.
    #[must_use]
    pub fn len(&self) -> usize {
        self.nx * self.nz
    }

    /// True when the grid has no pixels.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Builds the imaging grid for `model` at integer decimation `decim`.
///
/// The native grid is 512 x 512; decimation by k keeps every k-th pixel center
/// starting from the first, so decimated centers are a subset of the native
/// ones and the covered extent (pixel count x pixel size) is unchanged.
/// `decim` must divide 512.
pub fn build_grid(model: ArrayModel, decim: u32) -> Result<ImagingGrid> {
    const NATIVE: u32 = 512;
    if decim == 0 || NATIVE % decim != 0 {
        return Err(Error::BadDecimation(decim));
    }
    let spec = model_spec(model);
    let n = (NATIVE / decim) as usize;
    let grid = ImagingGrid {
        x0: (0.0 - (NATIVE - 1) as f64 / 2.0) * spec.dx,
        z0: spec.z_start + spec.dz / 2.0,
        nx: n,
        nz: n,
        dx: spec.dx * decim as f64,
        dz: spec.dz * decim as f64,
    };
    debug_assert!(grid.len() <= 1 << 22);
    Ok(grid)
}
