//! Seed streams.
//!
//! Every random draw in the crate comes from a `ChaCha8Rng` whose seed is
//! derived as `mix(seed, tag, index)` with the SplitMix64 finalizer. The
//! derivation is order-insensitive: replica 7 gets the same stream whether
//! or not replicas 0..7 ran first, and regardless of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags separating independent uses of one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    LatticeLengths = 1,
    EuclideanPoints = 2,
    PoissonCell = 3,
    Replica = 4,
    Oracle = 5,
    Pairs = 6,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a 64-bit sub-seed from a master seed, a purpose tag and an index.
pub fn derive_seed(seed: u64, stream: Stream, index: u64) -> u64 {
    let a = splitmix64(seed);
    let b = splitmix64(a ^ (stream as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(b ^ splitmix64(index.wrapping_add(0xA076_1D64_78BD_642F)))
}

pub fn stream_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream, index))
}
