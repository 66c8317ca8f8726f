//! Seed splitting.
//!
//! Every random quantity in a run comes from a ChaCha stream keyed by
//! `(root seed, replication, purpose)`. Streams never share state, so
//! e.g. lengthening a trajectory leaves the generated dataset untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Data = 1,
    Sampling = 2,
    Noise = 3,
    Population = 4,
    Oracle = 5,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives the seed of replication `rep` from a root seed.
pub fn derive_seed(root: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(root) ^ splitmix64(rep.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Independent generator for one `(seed, purpose)` pair.
pub fn stream(seed: u64, purpose: Purpose) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}
