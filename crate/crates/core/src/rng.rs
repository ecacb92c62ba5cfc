//! Seed derivation and per-episode random streams.
//!
//! All randomness in an episode flows from a single 64-bit seed. Independent
//! substreams are derived by mixing the seed with a stream tag, so the type
//! sequence of an episode does not depend on how many ex-post values were drawn.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random generator used throughout the crate. ChaCha output is
/// platform-independent, which keeps CSV outputs identical across machines.
pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable hash of a sequence of byte chunks and integers, seeded by `base`.
#[derive(Debug, Clone, Copy)]
pub struct SeedHasher {
    state: u64,
}

impl SeedHasher {
    pub fn new(base: u64) -> Self {
        Self {
            state: mix64(base ^ GOLDEN_GAMMA),
        }
    }

    pub fn write_u64(mut self, value: u64) -> Self {
        self.state = mix64(self.state.wrapping_add(GOLDEN_GAMMA) ^ value);
        self
    }

    pub fn write_str(mut self, value: &str) -> Self {
        for chunk in value.as_bytes().chunks(8) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            self = self.write_u64(u64::from_le_bytes(buf));
        }
        // length terminator so "ab" + "c" differs from "a" + "bc"
        self.write_u64(value.len() as u64)
    }

    pub fn finish(self) -> u64 {
        mix64(self.state)
    }
}

/// Named substreams of an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Types = 1,
    ExPostValues = 2,
    Auxiliary = 3,
}

/// Builds the generator for one substream of the episode identified by `seed`.
pub fn stream_rng(seed: u64, stream: Stream) -> SimRng {
    let derived = SeedHasher::new(seed).write_u64(stream as u64).finish();
    SimRng::seed_from_u64(derived)
}

/// Seed of replicate `replicate` of `policy` at horizon `horizon` in a sweep.
pub fn replicate_seed(base_seed: u64, policy: &str, horizon: u64, replicate: u64) -> u64 {
    SeedHasher::new(base_seed)
        .write_str(policy)
        .write_u64(horizon)
        .write_u64(replicate)
        .finish()
}
