//! Deterministic random streams.
//!
//! Every stochastic draw in the toolkit comes from a stream keyed by
//! (dataset seed, acquisition index, role, sub-index). Streams are
//! independent ChaCha8 instances, so reordering or skipping one consumer
//! never perturbs another, and any acquisition can be regenerated in
//! isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is consumed for. Each role gets a disjoint key space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    /// Per-acquisition medium draw (speed of sound).
    Medium,
    /// Per-acquisition excitation draw (frequency, cycles, peak pressure).
    Excitation,
    /// Cloud placement and bubble population; sub-index = cloud number.
    Cloud,
    /// Per-bubble emission draws; sub-index = bubble number.
    Emission,
    /// Additive channel noise.
    Noise,
}

impl StreamRole {
    fn salt(self) -> u64 {
        // Arbitrary fixed constants; distinct per role and never reused.
        match self {
            StreamRole::Medium => 0x4d45_4449_554d_0001,
            StreamRole::Excitation => 0x4558_4349_5445_0002,
            StreamRole::Cloud => 0x434c_4f55_4420_0003,
            StreamRole::Emission => 0x454d_4954_2020_0004,
            StreamRole::Noise => 0x4e4f_4953_4520_0005,
        }
    }
}

/// Derives the stream for (`seed`, `acq_index`, `role`, `sub_index`).
///
/// The 256-bit ChaCha key is the four little-endian u64 words
/// `[seed, acq_index, role salt, sub_index]`, so distinct tuples give
/// distinct keys without any hashing step to collide.
#[must_use]
pub fn stream(seed: u64, acq_index: u64, role: StreamRole, sub_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&acq_index.to_le_bytes());
    key[16..24].copy_from_slice(&role.salt().to_le_bytes());
    key[24..32].copy_from_slice(&sub_index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
