//! Counter-based random streams.
//!
//! Every random number used by a simulation is addressed by
//! `(seed, domain, index, draw)`: the ChaCha8 key comes from the seed, the
//! stream number is the item index (an atom, a sample) and the word position
//! encodes the domain and the draw counter. Values therefore do not depend
//! on the order in which items are processed, which keeps parallel runs
//! bit-identical to sequential ones.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Words reserved per domain inside one stream.
const DOMAIN_WORDS: u128 = 1 << 40;

/// Independent uses of the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Domain {
    Position = 0,
    Excitation = 1,
    Spinor = 2,
    Auxiliary = 3,
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    base: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for item `index` in `domain`, positioned at draw 0.
    pub fn stream(&self, domain: Domain, index: u64) -> Stream {
        self.stream_at(domain, index, 0)
    }

    /// Stream for item `index` in `domain`, positioned at draw `draw`.
    pub fn stream_at(&self, domain: Domain, index: u64, draw: u64) -> Stream {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        // each draw consumes one u64 = two 32-bit words
        rng.set_word_pos(domain as u128 * DOMAIN_WORDS + 2 * draw as u128);
        Stream { rng }
    }

    /// Single uniform deviate in the open interval (0, 1).
    pub fn uniform(&self, domain: Domain, index: u64, draw: u64) -> f64 {
        self.stream_at(domain, index, draw).uniform()
    }
}

/// Sequential draws from one `(domain, index)` stream.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    /// Uniform deviate in the open interval (0, 1), 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate (Box-Muller, cosine branch).
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }
}
