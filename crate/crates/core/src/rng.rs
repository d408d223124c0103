//! Seed derivation and generator construction.
//!
//! Every random draw in the crate flows through a `ChaCha8Rng` built from an
//! explicit `u64` seed, so any model is reproducible from the seed it logs.
//! Sub-seeds for independent streams (feature ids, level flips, tie breaks,
//! fold shuffles, ...) are derived with a splitmix64 chain so that streams
//! never alias even when the tags are small integers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags. Each randomized subsystem owns one tag so derived seeds for
/// different purposes cannot collide.
pub(crate) mod tag {
    pub const RANDOM_VECTOR: u64 = 0x01;
    pub const LEVELS: u64 = 0x02;
    pub const FEATURE_IDS: u64 = 0x03;
    pub const TIE_BREAK: u64 = 0x04;
    pub const FOLDS: u64 = 0x05;
    pub const KMEANS_INIT: u64 = 0x06;
    pub const CENTROID_TIE: u64 = 0x07;
    pub const REG_BASES: u64 = 0x08;
    pub const REG_SHUFFLE: u64 = 0x09;
    pub const REG_SAMPLE: u64 = 0x0a;
    pub const GRAPH_NODE: u64 = 0x0b;
    pub const GRAPH_WEIGHT: u64 = 0x0c;
    pub const GRAPH_MEMORY_TIE: u64 = 0x0d;
    pub const GRAPH_GLOBAL_TIE: u64 = 0x0e;
    pub const GRAPH_NONEDGE: u64 = 0x0f;
    pub const GRAPH_MITIGATE: u64 = 0x10;
    pub const HADAMARD: u64 = 0x11;
}

#[inline]
pub(crate) fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Mix a base seed with a stream tag.
#[inline]
pub(crate) fn derive(base: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(base) ^ tag)
}

/// Mix a base seed with a stream tag and an index within that stream.
#[inline]
pub(crate) fn derive2(base: u64, tag: u64, index: u64) -> u64 {
    splitmix64(derive(base, tag) ^ splitmix64(index))
}

/// Stable hash of a byte string into the seed chain. Used where ties must be
/// resolved content-addressably (identical inputs, identical flips) rather
/// than by position in a stream.
#[inline]
pub(crate) fn derive_bytes(base: u64, tag: u64, bytes: &[u8]) -> u64 {
    let mut h = derive(base, tag);
    for chunk in bytes.chunks(8) {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        h = splitmix64(h ^ u64::from_le_bytes(word));
    }
    h
}

#[inline]
pub(crate) fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
