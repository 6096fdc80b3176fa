//! Deterministic seeded randomness.
//!
//! All randomized routines draw from a ChaCha8 stream cipher, a
//! counter-based generator whose output is bit-stable across platforms;
//! independent substreams are split off by stream id.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator fully determined by `seed`.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `stream` of the generator for `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = seeded_rng(seed);
    rng.set_stream(stream);
    rng
}
