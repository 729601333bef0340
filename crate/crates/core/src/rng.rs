//! Seeded random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a master seed with a
//! separate 64-bit stream id per chunk, so chunk `i` draws the same
//! numbers no matter which worker runs it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Default master seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 20_160_601;

#[derive(Debug, Clone)]
pub struct RandomStream {
    inner: ChaCha8Rng,
}

impl RandomStream {
    /// Stream 0 of `seed`.
    pub fn new(seed: u64) -> Self {
        Self::for_chunk(seed, 0)
    }

    /// Independent stream for chunk `chunk` of a run keyed by `seed`.
    pub fn for_chunk(seed: u64, chunk: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(chunk);
        Self { inner }
    }

    /// Stream for a named purpose, so that e.g. coupling statistics and
    /// W samples under the same master seed do not reuse numbers.
    pub fn for_purpose(seed: u64, purpose: &str, chunk: u64) -> Self {
        // FNV-1a of the label folded into the key
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in purpose.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        Self::for_chunk(seed ^ h, chunk)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
