//! Counter-based seed derivation.
//!
//! Every random quantity in the crate is drawn from a [`SplitMix64`] stream
//! whose state is a pure function of a root seed and a tuple of counters
//! (row, column, stream id, trial, ...). Nothing is shared between calls, so
//! generation can be split across threads without changing a single bit.
//!
//! The mixing function is the SplitMix64 finalizer:
//!
//! ```text
//! z = x + 0x9E3779B97F4A7C15
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z ^ (z >> 31)
//! ```
//!
//! and a key `(k0, k1, ..., km)` is folded as `h = mix(h ^ k_i)` starting
//! from `h = mix(k0)`.

use rand::RngCore;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer applied to `x + GOLDEN_GAMMA`.
#[inline]
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a key tuple into a single 64-bit seed.
pub fn derive_seed(keys: &[u64]) -> u64 {
    let mut iter = keys.iter();
    let mut h = match iter.next() {
        Some(&k) => mix64(k),
        None => return mix64(0),
    };
    for &k in iter {
        h = mix64(h ^ k);
    }
    h
}

/// 64-bit FNV-1a, used to turn experiment tags into seed keys.
pub fn tag_hash(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Per-trial seed: `derive_seed([root, tag_hash(tag), n, trial])`.
pub fn trial_seed(root: u64, tag: &str, n: u64, trial: u64) -> u64 {
    derive_seed(&[root, tag_hash(tag), n, trial])
}

/// Stream ids used when deriving per-entry generators.
pub mod stream {
    pub const VALUE: u64 = 0;
    pub const MASK: u64 = 1;
    pub const AUX: u64 = 2;
}

/// The SplitMix64 generator. Small state, passes BigCrush, and trivially
/// seekable, which is all the per-entry scheme needs.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Generator for a single matrix entry.
    pub fn for_entry(seed: u64, stream: u64, row: usize, col: usize) -> Self {
        Self::new(derive_seed(&[seed, stream, row as u64, col as u64]))
    }

    /// Generator keyed by an arbitrary tuple.
    pub fn keyed(keys: &[u64]) -> Self {
        Self::new(derive_seed(keys))
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for SplitMix64 {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
