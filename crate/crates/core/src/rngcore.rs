//! Counter-addressable random streams.
//!
//! A stream is identified by `(seed, stream_id)` and positioned by a 64-bit
//! counter that advances by one per `u64` drawn. Streams are backed by ChaCha8
//! (`rand_chacha`): the seed is expanded into the cipher key, the stream id
//! selects the ChaCha stream and the counter maps onto the keystream word
//! position, so every output is a pure function of `(seed, stream_id, counter)`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Full address of a position in a random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub stream_id: u64,
    pub counter: u64,
}

impl StreamKey {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self {
            seed,
            stream_id,
            counter: 0,
        }
    }
}

/// Random stream state. Cheap to create; never shared across work items.
#[derive(Debug, Clone)]
pub struct Stream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

const U53_SCALE: f64 = 1.0 / (1u64 << 53) as f64;

impl Stream {
    /// Stream `stream_id` of `seed`, positioned at counter 0.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self::at(StreamKey::new(seed, stream_id))
    }

    /// Stream positioned at an arbitrary counter.
    pub fn at(key: StreamKey) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(key.seed);
        rng.set_stream(key.stream_id);
        // two 32-bit keystream words per u64
        rng.set_word_pos(u128::from(key.counter) * 2);
        Self {
            seed: key.seed,
            stream_id: key.stream_id,
            rng,
            spare_normal: None,
        }
    }

    /// Current address. A cached Box–Muller partner is not part of the key,
    /// so keys are exact only between whole gaussian pairs.
    pub fn key(&self) -> StreamKey {
        StreamKey {
            seed: self.seed,
            stream_id: self.stream_id,
            counter: (self.rng.get_word_pos() / 2) as u64,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * U53_SCALE
    }

    /// Standard normal by Box–Muller; each pair consumes exactly two counters.
    #[inline]
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let (z0, z1) = self.gaussian_pair();
        self.spare_normal = Some(z1);
        z0
    }

    /// Both Box–Muller outputs from the next two uniforms.
    #[inline]
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        // 1 − u lies in (0, 1], so the logarithm is finite
        let u1 = 1.0 - self.uniform01();
        let u2 = self.uniform01();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }
}
