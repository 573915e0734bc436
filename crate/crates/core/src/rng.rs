//! Counter-based uniforms.
//!
//! Every random quantity in a lattice realization is a pure function of a
//! stream key and the coordinates it belongs to. Grids of different sizes built
//! from the same key share their common edges, replicates are independent
//! streams, and the result never depends on evaluation order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function; a bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Purpose tags so that different consumers of one (seed, replicate) pair
/// never reuse the same uniforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Lane {
    EdgeTime = 1,
    CouplingAux = 2,
    OrientedEdge = 3,
    VertexClock = 4,
    Resample = 5,
    Stream = 6,
}

/// Key of one independent stream of counter-based uniforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    base: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64, replicate: u64, lane: Lane) -> Self {
        let a = mix64(master_seed.wrapping_add(GOLDEN));
        let b = mix64(a ^ replicate.wrapping_mul(GOLDEN).wrapping_add(0x632B_E59B_D9B4_E019));
        let base = mix64(b ^ (lane as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
        StreamKey { base }
    }

    /// Raw 64 random bits for a counter.
    #[inline]
    pub fn bits(&self, counter: u64) -> u64 {
        mix64(self.base ^ mix64(counter.wrapping_mul(GOLDEN) ^ 0x2545_F491_4F6C_DD1D))
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&self, counter: u64) -> f64 {
        (self.bits(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Sequential generator for inherently sequential consumers (growth
    /// trajectories, bootstrap resampling).
    pub fn sequential(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.bits(u64::MAX))
    }
}

/// Packs a first-quadrant edge `(x, y, orientation)` into a counter.
/// Coordinates must be below 2^31.
#[inline]
pub fn edge_counter(x: usize, y: usize, north: bool) -> u64 {
    debug_assert!(x < (1 << 31) && y < (1 << 31));
    ((x as u64) << 32) | ((y as u64) << 1) | north as u64
}

/// Packs an oriented-lattice edge leaving `(x, level)` into a counter.
/// `x` is signed and must satisfy |x| < 2^31, `level` < 2^31.
#[inline]
pub fn oriented_counter(x: i64, level: u64, rightward: bool) -> u64 {
    let shifted = (x + (1i64 << 31)) as u64;
    debug_assert!(shifted < (1 << 32) && level < (1 << 31));
    (shifted << 32) | (level << 1) | rightward as u64
}
