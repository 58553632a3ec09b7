//! Seed derivation shared by every randomised experiment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for sub-experiment `stream` of a run rooted at `root`.
pub fn rng_for(root: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream);
    rng
}

/// A child seed, for handing to code that wants a plain `u64`.
pub fn derive_seed(root: u64, counter: u64) -> u64 {
    use rand::RngCore;
    rng_for(root, counter).next_u64()
}
