//! Seeded substreams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream addressed by
//! `(seed, path)`, where the path names the purpose and position of the
//! draw (layer, row, replication, ...). Streams with different paths are
//! independent, so results do not depend on evaluation order and work can
//! be split across threads without changing any output.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags used as the first path component.
pub mod purpose {
    pub const CORE: u64 = 0x636f_7265;
    pub const LABELS: u64 = 0x6c61_6265;
    pub const DEGREES: u64 = 0x6465_6772;
    pub const SAMPLE: u64 = 0x7361_6d70;
    pub const FLIP: u64 = 0x666c_6970;
    pub const KMEDIANS: u64 = 0x6b6d_6564;
    pub const PROFILE: u64 = 0x7072_6f66;
    pub const REPLICATION: u64 = 0x7265_706c;
    pub const SVD_START: u64 = 0x7376_6473;
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a 64-bit child seed from `seed` and a path of integers.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut state = seed;
    let mut h = splitmix64(&mut state);
    for &p in path {
        state ^= p.wrapping_mul(0xff51_afd7_ed55_8ccd).rotate_left(17) ^ h;
        h = splitmix64(&mut state);
    }
    h
}

/// A generator for the substream `(seed, path)`.
pub fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut state = derive_seed(seed, path);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
