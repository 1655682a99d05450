//! Named random streams derived from one master seed.
//!
//! Each stream is a ChaCha8 stream keyed by the seed, selected by a
//! (purpose, index) pair. Vendor attributes are keyed by vendor index and
//! request attributes by episode, so changing the strategy or adding vendors
//! leaves every other draw untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Capacity = 1,
    BasePrice,
    Markup,
    Arrivals,
    Bundles,
    Durations,
    Waits,
    Weights,
}

pub fn stream(seed: u64, purpose: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 48) | (index & ((1 << 48) - 1)));
    rng
}
