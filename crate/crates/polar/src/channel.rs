//! BPSK modulation, seeded AWGN transmission, and channel LLRs.
//!
//! Noise is generated by a ChaCha12 stream seeded from
//! `(master_seed, snr_db, frame_index)`, so every frame owns an
//! independent generator and a simulation is reproducible for a given
//! build regardless of scheduling.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::word::{BitWord, LlrWord};

/// Interpretation of an SNR figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SnrConvention {
    /// Energy per information bit over noise density; scaled by rate.
    #[default]
    #[serde(rename = "eb_n0")]
    EbN0,
    /// Energy per symbol over noise density.
    #[serde(rename = "es_n0")]
    EsN0,
}

/// BPSK/AWGN channel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    snr_db: f64,
    convention: SnrConvention,
    rate: f64,
    noise_sigma: f64,
}

impl ChannelModel {
    /// Channel at `snr_db` under the given convention; `rate` is the
    /// code rate `K/N` used for the Eb/N0 scaling (CRC bits count as
    /// information).
    pub fn new(snr_db: f64, convention: SnrConvention, rate: f64) -> Self {
        let es_n0 = match convention {
            SnrConvention::EbN0 => rate * 10f64.powf(snr_db / 10.0),
            SnrConvention::EsN0 => 10f64.powf(snr_db / 10.0),
        };
        // Unit-energy BPSK: sigma^2 = 1 / (2 Es/N0).
        let noise_sigma = (0.5 / es_n0).sqrt();
        Self {
            snr_db,
            convention,
            rate,
            noise_sigma,
        }
    }

    pub fn from_ebn0(snr_db: f64, rate: f64) -> Self {
        Self::new(snr_db, SnrConvention::EbN0, rate)
    }

    pub fn from_esn0(snr_db: f64) -> Self {
        Self::new(snr_db, SnrConvention::EsN0, 1.0)
    }

    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    pub fn convention(&self) -> SnrConvention {
        self.convention
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }
}

/// Maps bit 0 to `+1.0` and bit 1 to `-1.0`.
pub fn modulate_bpsk(x: &BitWord) -> Vec<f64> {
    x.iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect()
}

/// Adds white Gaussian noise from the provided generator.
pub fn transmit_with(symbols: &[f64], model: &ChannelModel, rng: &mut impl Rng) -> Vec<f64> {
    symbols
        .iter()
        .map(|&s| {
            let n: f64 = rng.sample(StandardNormal);
            s + model.noise_sigma * n
        })
        .collect()
}

/// Adds white Gaussian noise from a fresh generator seeded by `seed`.
pub fn transmit(symbols: &[f64], model: &ChannelModel, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    transmit_with(symbols, model, &mut rng)
}

/// Channel LLRs for BPSK over AWGN: `2 y / sigma^2`, saturated by
/// [`LlrWord`] construction.
pub fn channel_llrs(y: &[f64], model: &ChannelModel) -> LlrWord {
    let scale = 2.0 / (model.noise_sigma * model.noise_sigma);
    LlrWord::new(y.iter().map(|&v| scale * v).collect())
}

/// Per-frame generator seeded from `(master_seed, snr_db, frame_index)`.
///
/// The 32-byte ChaCha12 seed is the little-endian concatenation of the
/// three values and a fixed domain tag, so frames are independent and
/// the mapping is stable.
pub fn frame_rng(master_seed: u64, snr_db: f64, frame_index: u64) -> ChaCha12Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&snr_db.to_bits().to_le_bytes());
    seed[16..24].copy_from_slice(&frame_index.to_le_bytes());
    seed[24..32].copy_from_slice(b"plrframe");
    ChaCha12Rng::from_seed(seed)
}
