//! Seedable, splittable random number generation.
//!
//! Every stochastic operation in this crate takes an explicit generator.
//! Parallel or repeated work derives an independent stream per work item
//! from `(master seed, item index)` so results are reproducible regardless
//! of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// Master generator for a run.
pub fn master(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream for work item `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
