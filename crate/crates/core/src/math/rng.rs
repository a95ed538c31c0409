//! Seeded, splittable random streams.
//!
//! Every stochastic operation in the crate draws from an [`RngStream`]. A stream
//! is identified by `(seed, stream_id)` and is backed by ChaCha8, whose output
//! is specified bit-for-bit, so identical `(seed, stream_id, draw sequence)`
//! reproduce identical values on every platform.
//!
//! Parallel work never shares a stream: each unit (sample, node, bootstrap
//! replicate) derives its own child with [`RngStream::substream`], which keeps
//! results independent of thread count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Seeded random stream. Cloning snapshots the current position.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Fresh child stream for a sub-purpose. Depends only on this stream's
    /// identity and `id`, never on how many draws have been taken.
    pub fn substream(&self, id: u64) -> RngStream {
        let child = splitmix64(self.stream_id ^ splitmix64(id.wrapping_add(0x5851_F42D_4C95_7F2D)));
        RngStream::new(self.seed, child)
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Lemire's multiply-shift; the bias is below 2^-64 * n.
        ((self.inner.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn std_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Exponential(1) draw.
    pub fn exp1(&mut self) -> f64 {
        -self.uniform().ln()
    }
}

impl RngCore for RngStream {
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
