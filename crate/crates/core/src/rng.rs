//! Seed derivation. Every random draw in the crate comes from a ChaCha8
//! stream keyed by a master seed and a stream id, so results do not depend
//! on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags keep the draws of unrelated stages apart.
pub mod tag {
    pub const GRAPH: u64 = 1;
    pub const SIZES: u64 = 2;
    pub const EIGEN: u64 = 3;
    pub const KMEANS: u64 = 4;
    pub const LANCZOS: u64 = 5;
}

/// splitmix64 finalizer; used to fold several ids into one 64-bit seed.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a list of ids.
pub fn derive(seed: u64, ids: &[u64]) -> u64 {
    ids.iter().fold(mix(seed), |acc, &id| mix(acc ^ mix(id)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for stream `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
