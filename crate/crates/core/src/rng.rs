//! Explicit, splittable random state.
//!
//! Every sampling routine takes a `&mut RngState`; nothing reads ambient
//! randomness. States are keyed by a 64-bit seed expanded into a ChaCha8
//! key, so streams are counter-based and reproducible across platforms.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MIX_K1: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_K2: u64 = 0xD1B5_4A32_D192_ED03;

/// MurmurHash3 64-bit finalizer; a bijection on `u64`.
#[inline]
pub fn fmix64(mut h: u64) -> u64 {
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    h = h.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    h ^= h >> 33;
    h
}

/// Seed for `(master, replicate, stream)`.
///
/// `mix(m, r, s) = fmix64(fmix64(m ^ K1) ^ fmix64(((r << 32) | s) ^ K2))`
/// with `K1 = 0x9E3779B97F4A7C15`, `K2 = 0xD1B54A32D192ED03`. For a fixed
/// master the map is injective in `(replicate, stream)`.
pub fn mix_seed(master: u64, replicate: u32, stream: u32) -> u64 {
    let combined = ((replicate as u64) << 32) | stream as u64;
    fmix64(fmix64(master ^ MIX_K1) ^ fmix64(combined ^ MIX_K2))
}

/// Random state for one replicate and stream.
pub fn derive_seed(master: u64, replicate: u32, stream: u32) -> RngState {
    RngState::from_seed_u64(mix_seed(master, replicate, stream))
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(MIX_K1);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn from_seed_u64(seed: u64) -> Self {
        let mut sm = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut sm).to_le_bytes());
        }
        Self {
            seed,
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    /// The 64-bit seed this state was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child state; advances `self` by one draw.
    pub fn split(&mut self) -> RngState {
        let s = self.inner.next_u64();
        RngState::from_seed_u64(fmix64(s ^ MIX_K2))
    }
}

impl RngCore for RngState {
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
