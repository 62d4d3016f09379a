//! Counter-based hashing used for every random source in the crate.
//!
//! Random quantities that must be coupled across sizes (edge uniforms,
//! template weights, perturbation levels) are pure functions of a seed and
//! their integer coordinates, so they never have to be stored.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a seed together with a sequence of coordinates.
#[inline]
pub fn hash_words(seed: u64, words: &[u64]) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    for &w in words {
        h = mix64(h.wrapping_add(GOLDEN) ^ mix64(w.wrapping_add(GOLDEN)));
    }
    h
}

/// Maps a hash to a uniform double in `[0, 1)` using its top 53 bits.
#[inline]
pub fn unit_interval(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Maps a hash to `0..bound` by a widening multiply.
#[inline]
pub fn below(h: u64, bound: u64) -> u64 {
    ((h as u128 * bound as u128) >> 64) as u64
}

/// Purpose tags keep the streams derived from one master seed apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    EdgeCoupling = 1,
    Permutation = 2,
    Weights = 3,
    Theta = 4,
    RowPerturbation = 5,
    ColumnPerturbation = 6,
}

/// `hash64(master_seed, trial_index, purpose)`.
pub fn derive_seed(master_seed: u64, trial_index: u64, purpose: Purpose) -> u64 {
    hash_words(master_seed, &[trial_index, purpose as u64])
}

/// A stream generator for code that wants a conventional RNG.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
