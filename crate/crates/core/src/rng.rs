//! Seeded random streams.
//!
//! Every random quantity comes from a ChaCha20 generator keyed by the 64-bit
//! run seed (via `seed_from_u64`) with a fixed stream id per purpose, so that
//! the sensing matrix, the ground truth and the noise are independent of one
//! another and of how much randomness each consumer draws.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Stream id for the sensing matrix entries.
pub const STREAM_MATRIX: u64 = 1;
/// Stream id for the ground-truth support and values.
pub const STREAM_TRUTH: u64 = 2;
/// Stream id for observation noise.
pub const STREAM_NOISE: u64 = 3;
/// Stream id for synthetic graph construction.
pub const STREAM_GRAPH: u64 = 4;
/// Stream id for the randomized DMO.
pub const STREAM_DMO: u64 = 5;
/// Stream id for random support draws in the PGD baseline.
pub const STREAM_PGD: u64 = 6;

pub type StreamRng = ChaCha20Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
