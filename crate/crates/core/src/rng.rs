//! Seeded randomness.
//!
//! Every stochastic step uses [`ChaCha8Rng`] seeded from a `u64`. ChaCha output
//! is specified bit-for-bit independent of platform and endianness, so a seed
//! reproduces the same stream everywhere. Gaussian draws use
//! `rand_distr::StandardNormal` (ziggurat) on top of that stream.
//!
//! Independent streams inside one run are derived with [`substream`], which
//! mixes a label into the seed with SplitMix64 so that, e.g., the augmentation
//! stream and the training stream never alias even when the user gives them
//! the same seed.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `seed` and a stream label.
pub fn substream(seed: u64, label: &str) -> u64 {
    label
        .bytes()
        .fold(mix(seed), |acc, b| mix(acc ^ u64::from(b)))
}
