//! Counter-derived random streams.
//!
//! One root seed feeds every stochastic engine. Independent streams (one per
//! trajectory, say) are selected with ChaCha's 64-bit stream counter, so the
//! numbers a trajectory sees do not depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Generator for `stream` under the root `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
