//! Reproducible random streams.
//!
//! Every stochastic routine in this crate draws from a [`RandomStream`]: a
//! master seed plus a 64-bit stream index mapped onto one of ChaCha8's 2^64
//! independent streams. Replication r of an experiment always samples from
//! stream r of the experiment's key, so results are identical for any worker
//! count or scheduling order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Key identifying a family of independent random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    master: u64,
}

impl RandomStream {
    pub fn new(master_seed: u64) -> Self {
        RandomStream { master: master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master
    }

    /// Derive a child key for an independent sub-family (one per table row,
    /// experiment cell, ...). Children of distinct salts never collide with
    /// each other or with the parent.
    pub fn child(&self, salt: u64) -> Self {
        RandomStream {
            master: mix(self.master, salt),
        }
    }

    /// Generator for stream `index` of this key.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(index);
        rng
    }
}

/// SplitMix64 finalizer over (seed, salt); used only to derive child keys.
fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
