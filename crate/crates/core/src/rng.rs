//! Deterministic stream derivation.
//!
//! Every source of randomness in a run is a ChaCha stream keyed by the run
//! seed plus a small tag tuple (round, client id, purpose). Parallel and
//! serial execution therefore draw from identical streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche for combining tag words.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives an independent generator from a base seed and a tag path.
pub fn derive_rng(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = mix(seed);
    for &t in tags {
        state = mix(state ^ t.wrapping_mul(0xff51afd7ed558ccd));
    }
    ChaCha8Rng::seed_from_u64(state)
}

/// Tag words naming the purpose of a derived stream.
pub mod stream {
    pub const CLIENT_SAMPLING: u64 = 1;
    pub const CLIENT_OPTION: u64 = 2;
    pub const SERVER_OPTION: u64 = 3;
    pub const DATA: u64 = 4;
    pub const INIT: u64 = 5;
    pub const ORACLE: u64 = 6;
    pub const PARTITION: u64 = 7;
}
