//! Seeding helpers.
//!
//! Every stochastic operation in the crate takes an explicit `u64` seed and
//! draws from a [`ChaCha8Rng`] stream, so runs replicate across platforms.
//! Independent substreams (per restart, per dyad, ...) are derived by mixing
//! the base seed with a stream index.

pub use rand_chacha::ChaCha8Rng;

/// Derive an independent substream seed from a base seed and stream index.
///
/// SplitMix64 finalizer; distinct `(seed, stream)` pairs map to well-spread
/// outputs.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed a ChaCha stream for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream))
}
