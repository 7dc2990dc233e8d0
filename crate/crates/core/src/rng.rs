//! Seeded random streams.
//!
//! Every chain draws from `ChaCha12Rng` seeded with the run seed; chain `c`
//! selects stream `c` of that seed via [`rand_chacha::ChaCha12Rng::set_stream`].
//! Streams of one seed never overlap, so chains can run in any order or in
//! parallel and still reproduce bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type ChainRng = ChaCha12Rng;

/// Generator for chain `stream` of run `seed`.
pub fn chain_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed for a named sub-experiment.
///
/// Uses a splitmix64 finalizer so neighbouring tags land far apart.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
