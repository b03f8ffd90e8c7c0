//! Seeded random streams.
//!
//! Every stochastic routine takes a master seed and derives independent
//! streams by counter, so results do not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator keyed by a purpose tag as well, so unrelated consumers of the
/// same master seed never share a stream.
pub fn tagged(seed: u64, tag: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(index);
    rng
}

pub(crate) mod tags {
    pub const ZOO_AXES: u64 = 1;
    pub const EXPRESSIVITY: u64 = 2;
    pub const MEYER_WALLACH: u64 = 3;
    pub const FOURIER: u64 = 4;
    pub const INIT: u64 = 5;
    pub const SHUFFLE: u64 = 6;
    pub const FOREST: u64 = 7;
    pub const SYNTH: u64 = 8;
    pub const SPLIT: u64 = 9;
}
