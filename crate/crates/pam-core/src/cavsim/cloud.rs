//! Bubble cloud geometry and seeded sampling.
//!
//! Clouds are elliptical with the minor axis lateral and the major axis
//! axial, matching the axially elongated point-spread function of a passive
//! imaging system. All lengths are meters.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Bubble count range per cloud.
pub const BUBBLE_COUNT_RANGE: (u32, u32) = (20, 100);
/// Full minor-axis (lateral) length range, m.
pub const MINOR_AXIS_RANGE: (f64, f64) = (0.1e-3, 0.8e-3);
/// Full major-axis (axial) length range, m.
pub const MAJOR_AXIS_RANGE: (f64, f64) = (0.6e-3, 12.0e-3);
/// Mean bubble radius is uniform over this range, m.
pub const RADIUS_MEAN_RANGE: (f64, f64) = (1.0e-6, 3.0e-6);
/// Per-bubble radius jitter about the cloud mean, m.
pub const RADIUS_STD: f64 = 0.1e-6;
/// Radii are resampled until they land in this physical range, m.
pub const RADIUS_LIMITS: (f64, f64) = (0.5e-6, 5.0e-6);

/// One bubble: position in the imaging plane and rest radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bubble {
    pub position: [f64; 2],
    pub radius: f64,
}

/// An elliptical cluster of bubbles.
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleCloud {
    pub center: [f64; 2],
    /// Full axial extent, m.
    pub major_axis: f64,
    /// Full lateral extent, m.
    pub minor_axis: f64,
    pub bubbles: Vec<Bubble>,
}

impl BubbleCloud {
    /// True when `p` lies inside (or on) the cloud ellipse.
    #[must_use]
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let u = (p[0] - self.center[0]) / (self.minor_axis / 2.0);
        let v = (p[1] - self.center[1]) / (self.major_axis / 2.0);
        u * u + v * v <= 1.0
    }
}

/// Where cloud centers may fall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudRegion {
    /// Centers span [-lateral_half, lateral_half] laterally, m.
    pub lateral_half: f64,
    /// Axial center range, m.
    pub axial: (f64, f64),
}

impl CloudRegion {
    /// Standard protocol region: full lateral aperture, 12.8-57.6 mm axially.
    #[must_use]
    pub fn for_aperture(aperture: f64) -> Self {
        CloudRegion {
            lateral_half: aperture / 2.0,
            axial: (12.8e-3, 57.6e-3),
        }
    }
}

/// Two-cloud placement: the clouds sit at both ends of a diameter of the
/// given length, tilted by an angle drawn from `angle_deg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPlacement {
    /// Diameter (center-to-center separation) range, m.
    pub separation: (f64, f64),
    /// Tilt from the lateral axis, degrees.
    pub angle_deg: (f64, f64),
}

impl Default for PairPlacement {
    fn default() -> Self {
        PairPlacement {
            separation: (4.0e-3, 8.0e-3),
            angle_deg: (-60.0, 60.0),
        }
    }
}

/// Uniform draw over a closed range; a degenerate range pins the value
/// without consuming a draw, so overrides never shift the stream layout.
pub(crate) fn uniform(rng: &mut impl Rng, range: (f64, f64)) -> f64 {
    if range.0 == range.1 {
        range.0
    } else {
        rng.gen_range(range.0..range.1)
    }
}

/// Draws the bubble population for a cloud centered at `center`.
///
/// Draw order is fixed: count, minor axis, major axis, mean radius, then per
/// bubble (position via rejection sampling in the unit disc, then radius,
/// resampled into [`RADIUS_LIMITS`]).
fn sample_cloud_body(center: [f64; 2], rng: &mut impl Rng) -> BubbleCloud {
    let count = rng.gen_range(BUBBLE_COUNT_RANGE.0..=BUBBLE_COUNT_RANGE.1) as usize;
    let minor = uniform(rng, MINOR_AXIS_RANGE);
    let major = uniform(rng, MAJOR_AXIS_RANGE);
    let mean_radius = uniform(rng, RADIUS_MEAN_RANGE);
    let radius_dist = Normal::new(mean_radius, RADIUS_STD).expect("finite radius parameters");
    let mut bubbles = Vec::with_capacity(count);
    for _ in 0..count {
        let (mut u, mut v);
        loop {
            u = rng.gen_range(-1.0..1.0);
            v = rng.gen_range(-1.0..1.0);
            if u * u + v * v <= 1.0 {
                break;
            }
        }
        let position = [
            center[0] + u * minor / 2.0,
            center[1] + v * major / 2.0,
        ];
        let radius = loop {
            let r = radius_dist.sample(rng);
            if (RADIUS_LIMITS.0..=RADIUS_LIMITS.1).contains(&r) {
                break r;
            }
        };
        bubbles.push(Bubble { position, radius });
    }
    BubbleCloud {
        center,
        major_axis: major,
        minor_axis: minor,
        bubbles,
    }
}

/// Samples a single cloud: center uniform over `region`, then body draws.
pub fn sample_cloud(region: &CloudRegion, rng: &mut impl Rng) -> Result<BubbleCloud> {
    validate_region(region)?;
    let center = [
        uniform(rng, (-region.lateral_half, region.lateral_half)),
        uniform(rng, region.axial),
    ];
    Ok(sample_cloud_body(center, rng))
}

/// Samples a cloud pair: the circle center is drawn like a single-cloud
/// center from `rng_a`, cloud bodies come from `rng_a` and `rng_b`
/// respectively so each cloud has its own stream.
pub fn sample_cloud_pair(
    region: &CloudRegion,
    pair: &PairPlacement,
    rng_a: &mut impl Rng,
    rng_b: &mut impl Rng,
) -> Result<[BubbleCloud; 2]> {
    validate_region(region)?;
    if pair.separation.0 > pair.separation.1 || pair.separation.0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "bad separation range {:?}",
            pair.separation
        )));
    }
    let circle_center = [
        uniform(rng_a, (-region.lateral_half, region.lateral_half)),
        uniform(rng_a, region.axial),
    ];
    let diameter = uniform(rng_a, pair.separation);
    let angle = uniform(rng_a, pair.angle_deg).to_radians();
    let (dx, dz) = (
        diameter / 2.0 * angle.cos(),
        diameter / 2.0 * angle.sin(),
    );
    let c0 = [circle_center[0] - dx, circle_center[1] - dz];
    let c1 = [circle_center[0] + dx, circle_center[1] + dz];
    Ok([
        sample_cloud_body(c0, rng_a),
        sample_cloud_body(c1, rng_b),
    ])
}

fn validate_region(region: &CloudRegion) -> Result<()> {
    if !(region.lateral_half > 0.0)
        || !(region.axial.0 > 0.0)
        || region.axial.0 > region.axial.1
    {
        return Err(Error::InvalidParameter(format!(
            "bad cloud region {region:?}"
        )));
    }
    Ok(())
}
