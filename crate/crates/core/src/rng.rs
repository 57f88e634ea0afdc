//! Deterministic sub-stream derivation.
//!
//! Every random quantity in a run is drawn from a generator keyed by
//! `(master_seed, drop_index, tag, sub)`. Streams never share state, so
//! drops (and schemes within a drop) can be evaluated in any order or on
//! any number of threads without changing a single output bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream tags. Adding a new consumer of randomness means adding a tag,
/// never reusing one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamTag {
    Geometry = 1,
    Channel = 2,
    RandomPhase = 3,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Builds the generator for one `(drop, tag, sub)` stream.
pub fn substream(master_seed: u64, drop_index: u64, tag: StreamTag, sub: u64) -> SimRng {
    let mut seed = [0u8; 32];
    let mut state = splitmix64(master_seed);
    for (i, word) in [drop_index, tag as u64, sub, 0].into_iter().enumerate() {
        state = splitmix64(state ^ word.wrapping_mul(0xD6E8_FEB8_6659_FD93));
        seed[i * 8..(i + 1) * 8].copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
