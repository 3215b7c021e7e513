//! Seeded random streams. Every consumer (an arrival process, a service
//! process, routing) gets its own ChaCha8 stream derived from the master
//! seed, so results do not depend on how events interleave.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// What a stream is used for; part of the stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Arrival,
    Service,
    Routing,
    Multiplication,
    Scenario,
}

impl StreamKind {
    fn code(self) -> u64 {
        match self {
            StreamKind::Arrival => 1,
            StreamKind::Service => 2,
            StreamKind::Routing => 3,
            StreamKind::Multiplication => 4,
            StreamKind::Scenario => 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    /// Stream `(replication, kind, index)` of the generator seeded by `seed`.
    pub fn new(seed: u64, replication: u32, kind: StreamKind, index: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let id = ((replication as u64) << 36) | (kind.code() << 32) | index as u64;
        rng.set_stream(id);
        Stream { rng }
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -libm::log(self.uniform()) / rate
    }

    /// Standard normal by Box–Muller (one of the pair is discarded).
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
    }

    /// Uniform index in `0..n`.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }
}
