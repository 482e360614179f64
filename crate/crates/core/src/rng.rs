//! Seeded random source for reproducible test matrices.
//!
//! The generator is PCG64 (`rand_pcg::Pcg64`: a 128-bit LCG whose output is
//! xorshifted and randomly rotated), seeded by expanding a `u64` through
//! SplitMix64 with its published constants. Both stages are fixed, so a seed
//! yields the same stream on every platform.
//!
//! Plain xorshift generators are linear over GF(2): every bit they emit is a
//! linear function of the state, so matrices filled from one would have
//! GF(2)-rank bounded by the state size. The PCG output permutation is not
//! linear, which is why it is used here.

use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;

#[derive(Clone, Debug)]
pub struct MatrixRng {
    inner: Pcg64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl MatrixRng {
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        let mut bytes = [0u8; 32];
        for chunk in bytes.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self {
            inner: Pcg64::from_seed(bytes),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform value in `0..bound` (rejection sampling, `bound > 0`).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Uniform value in `lo..=hi`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below((hi - lo + 1) as u64) as usize
    }
}
