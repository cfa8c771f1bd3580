//! Binary-input AWGN channel with BPSK mapping `0 -> +1`, `1 -> -1`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::product::{BitMatrix, LlrMatrix, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("Eb/N0 must be finite, got {0}")]
    InvalidSnr(f64),
    #[error("code rate must lie in (0, 1], got {0}")]
    InvalidRate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    eb_n0_db: f64,
    rate: f64,
    sigma2: f64,
}

impl ChannelParams {
    pub fn new(eb_n0_db: f64, rate: f64) -> Result<Self, ChannelError> {
        if !eb_n0_db.is_finite() {
            return Err(ChannelError::InvalidSnr(eb_n0_db));
        }
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(ChannelError::InvalidRate(rate));
        }
        let eb_n0 = 10f64.powf(eb_n0_db / 10.0);
        Ok(ChannelParams { eb_n0_db, rate, sigma2: 1.0 / (2.0 * rate * eb_n0) })
    }

    pub fn eb_n0_db(&self) -> f64 {
        self.eb_n0_db
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Noise variance `(2 R Eb/N0)^-1`.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// Identifies one independent random stream: a ChaCha8 key derived from
/// `seed` and the ChaCha stream selected by `stream_id`. Any stream can be
/// generated without generating the ones before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngSeed { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

#[inline]
pub fn bpsk(bit: u8) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The sign map B(.): non-negative values map to 0, negative to 1.
#[inline]
pub fn hard_bit(x: f64) -> u8 {
    (x < 0.0) as u8
}

pub fn modulate(bits: &BitMatrix) -> Matrix<f64> {
    bits.map(bpsk)
}

pub fn hard_decision(llrs: &LlrMatrix) -> BitMatrix {
    llrs.map(hard_bit)
}

/// Channel LLRs `L = 2 (x + z) / sigma^2` with `z ~ N(0, sigma^2)`.
pub fn transmit(bits: &BitMatrix, params: &ChannelParams, seed: RngSeed) -> LlrMatrix {
    let mut rng = seed.rng();
    let sigma = params.sigma();
    let scale = 2.0 / params.sigma2;
    let mut out = LlrMatrix::zeros(bits.n());
    for (l, &b) in out.as_mut_slice().iter_mut().zip(bits.as_slice()) {
        let z: f64 = StandardNormal.sample(&mut rng);
        *l = scale * (bpsk(b) + sigma * z);
    }
    out
}
