//! Counter-based random streams.
//!
//! A [`RandomStream`] is a ChaCha12 keystream addressed by a 64-bit seed and a
//! word counter. Sub-streams are derived by hashing the parent seed with a tag
//! path, so a Monte-Carlo trial identified by `(seed, point, trial)` draws the
//! same numbers no matter which thread runs it or in which order.

use num_complex::Complex64;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use super::MathError;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    rng: ChaCha12Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        for (i, chunk) in key.chunks_mut(8).enumerate() {
            let word = splitmix(seed ^ splitmix(i as u64));
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        Self {
            seed,
            rng: ChaCha12Rng::from_seed(key),
        }
    }

    /// Independent child stream addressed by `tags`. The result depends only
    /// on this stream's seed and the tags, never on how far it has advanced.
    pub fn derive(&self, tags: &[u64]) -> Self {
        let mut h = splitmix(self.seed);
        for &t in tags {
            h = splitmix(h ^ splitmix(t.wrapping_mul(GOLDEN_GAMMA)));
        }
        Self::new(h)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u64 {
        self.rng.get_word_pos() as u64
    }

    pub fn seek(&mut self, counter: u64) {
        self.rng.set_word_pos(counter as u128);
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }

    /// Uniform draw from `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`; `n` must be non-zero.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        // Lemire's multiply-shift with rejection.
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as usize;
            }
        }
    }

    pub fn bit(&mut self) -> bool {
        self.next_u32() & 1 == 1
    }

    /// One circularly symmetric complex Gaussian with total variance `variance`.
    pub fn complex_gaussian(&mut self, variance: f64) -> Complex64 {
        let s = (variance / 2.0).sqrt();
        let re = self.standard_normal();
        let im = self.standard_normal();
        Complex64::new(re * s, im * s)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// `n` i.i.d. draws of CN(0, variance): `variance / 2` per real dimension.
pub fn sample_complex_gaussian(
    stream: &mut RandomStream,
    n: usize,
    variance: f64,
) -> Result<Vec<Complex64>, MathError> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(MathError::InvalidArgument(format!(
            "variance must be positive and finite, got {variance}"
        )));
    }
    Ok((0..n).map(|_| stream.complex_gaussian(variance)).collect())
}
