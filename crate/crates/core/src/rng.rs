//! Counter-based random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream keyed by
//! `(seed, domain, index)`. The index selects one of 2^64 independent streams
//! of the same key, so work items (graph rows, trajectories, Monte Carlo
//! batches) own their randomness regardless of which thread runs them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent families of streams under one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Domain {
    GraphRow = 1,
    NaiveRow = 2,
    Profile = 3,
    Trace = 4,
    Annealed = 5,
    EntropyMc = 6,
    PathMass = 7,
    Lyapunov = 8,
    Replica = 9,
    Starts = 10,
    Oracle = 11,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key(seed: u64, domain: Domain) -> u64 {
    mix64(seed ^ (domain as u64).wrapping_mul(GOLDEN))
}

/// The stream `index` of family `domain` under `seed`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(key(seed, domain));
    rng.set_stream(index);
    rng
}

/// A child seed, for nesting (e.g. one master seed per replica).
pub fn derive_seed(seed: u64, domain: Domain, index: u64) -> u64 {
    mix64(key(seed, domain) ^ mix64(index))
}
