//! Deterministic seed derivation.
//!
//! Every random stream in the crate descends from a single master seed.
//! Child seeds are derived with [`split`], which applies the SplitMix64
//! finalizer to `master + (index + 1) * 0x9E3779B97F4A7C15`. Nested tasks
//! split repeatedly, e.g. `split(split(master, point), sample)`.
//! Streams are driven by ChaCha8, which is portable across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn split(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
