//! Seed fan-out. Every random stream in the toolkit is a ChaCha8 generator whose
//! seed is derived from a user seed plus a purpose tag and an index, so results
//! never depend on scheduling or on how many other streams were drawn.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent 64-bit seed for `(seed, purpose, index)`.
pub fn derive_seed(seed: u64, purpose: &str, index: u64) -> u64 {
    let mut h = splitmix64(seed);
    for b in purpose.bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    splitmix64(h ^ splitmix64(index))
}

pub fn stream(seed: u64, purpose: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, purpose, index))
}
