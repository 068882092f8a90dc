//! Deterministic random-number contract for every sampling routine.
//!
//! All Monte-Carlo code draws from ChaCha20 seeded through
//! [`rand::SeedableRng::seed_from_u64`]. There is no global generator; the
//! same inputs and seed always reproduce the same samples.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

pub type SeededRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Derived seed for the `index`-th independent stream of a batch.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index)
}

pub(crate) fn normal(rng: &mut SeededRng) -> f64 {
    StandardNormal.sample(rng)
}
