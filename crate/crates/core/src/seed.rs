//! Deterministic seed derivation and the simulator's random source.
//!
//! Every random stream is a `ChaCha8Rng` seeded from a 64-bit value. Streams
//! for distinct (master seed, path, subsystem, month, entity) tuples are
//! derived by folding each component through the SplitMix64 finalizer, so no
//! two consumers share RNG state and results do not depend on thread timing.
//! Normal variates come from `rand_distr::StandardNormal` (ziggurat).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Subsystem tags mixed into derived seeds.
pub mod tag {
    pub const PRICE: u64 = 0x7072_6963_6500_0001;
    pub const PAYMENTS: u64 = 0x7061_796d_0000_0002;
    pub const CHURN: u64 = 0x6368_7572_6e00_0003;
}

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a sequence of components into one seed. Order matters.
pub fn derive(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5eed_5eed_5eed_5eed, |acc, &p| mix64(acc ^ mix64(p)))
}

/// Stable 64-bit FNV-1a hash, used to turn string ids into seed components.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
