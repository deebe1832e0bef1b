//! Seed derivation for reproducible, schedule-independent random streams.
//!
//! Every stream is keyed by a base seed plus a list of tags (replicate
//! index, sample size, purpose). Tags are folded in with SplitMix64, so a
//! stream depends only on its key and never on which worker draws it or in
//! what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags separating independent uses of one cell seed.
pub mod purpose {
    pub const SAMPLE: u64 = 0x5341_4d50_4c45_0001;
    pub const BALL_MASS: u64 = 0x4241_4c4c_4d53_0002;
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// One SplitMix64 output step applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `seed` with each tag mixed in: `s ← splitmix64(s ⊕ splitmix64(tag + (k+1)·γ))`.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().enumerate().fold(splitmix64(seed), |s, (k, &tag)| {
        let salted = tag.wrapping_add(GOLDEN_GAMMA.wrapping_mul(k as u64 + 1));
        splitmix64(s ^ splitmix64(salted))
    })
}

/// Seed of the experiment cell `(n, replicate)`.
pub fn cell_seed(seed: u64, n: usize, replicate: usize) -> u64 {
    derive_seed(seed, &[n as u64, replicate as u64])
}

/// A ChaCha8 stream keyed by `seed` and `tags`.
pub fn stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tags))
}
