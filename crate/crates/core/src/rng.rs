//! Seeded random sources. Trial `i` of a run seeded with `s` draws from its own
//! stream seeded with `s ^ i`, so trials can run in any order or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn trial_rng(seed: u64, trial: u64) -> SimRng {
    seeded(seed ^ trial)
}
