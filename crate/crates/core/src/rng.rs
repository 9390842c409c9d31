//! Seeded random streams.
//!
//! Every Monte Carlo trial draws from its own ChaCha stream, selected by
//! `(seed, trial)`, so trials are reproducible and independent of how they
//! are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Stream for trial `trial` of a run seeded with `seed`.
pub fn trial_stream(seed: u64, trial: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
