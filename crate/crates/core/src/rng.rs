//! Seed derivation. Every random component of a replicate reads its own
//! ChaCha stream of the same key, so changing how many numbers one component
//! consumes never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Drivers = 1,
    InitialStates = 2,
    Arrivals = 3,
    Noise = 4,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Seed of replicate `rep` under root `seed`.
pub fn replicate_seed(seed: u64, rep: u64) -> u64 {
    seed ^ rep
}
