//! Seeding conventions shared by every stochastic routine.
//!
//! All randomness flows from ChaCha8 generators. A replication inside a batch
//! draws from stream `i` of the batch's master seed, so results depend only on
//! `(master_seed, i)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for replication `stream` under `master_seed`.
pub fn replication(master_seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Bernoulli trial that consumes no randomness when the outcome is certain.
///
/// Degenerate probabilities must not advance the stream: the IC equivalence
/// relies on `p_a = 0` leaving the spread draws untouched.
#[inline]
pub fn flip<R: rand::Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.random::<f64>() < p
    }
}
