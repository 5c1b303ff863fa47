//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a ChaCha stream selected by
//! `(seed, domain, index)`, so results do not depend on evaluation order or
//! thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent stream families sharing one user seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    RandomChannel = 1,
    Shots = 2,
    Spam = 3,
    Benchmark = 4,
}

/// Deterministic generator for item `index` of `domain`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    debug_assert!(index < 1 << 56);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 56) | index);
    rng
}
