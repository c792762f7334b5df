//! Seeded random streams.
//!
//! Every stochastic routine takes a `u64` seed; independent sub-streams are
//! derived from `(seed, key...)` so that parallel sweeps reproduce the
//! sequential result bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type MagicRng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mix a base seed with a list of keys into a new seed.
pub fn derive_seed(seed: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(splitmix(seed), |acc, &k| splitmix(acc ^ splitmix(k)))
}

pub fn rng_from_seed(seed: u64) -> MagicRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream keyed by `(seed, keys)`.
pub fn stream(seed: u64, keys: &[u64]) -> MagicRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, keys))
}
