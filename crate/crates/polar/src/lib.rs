//! Polar-code codec and Monte-Carlo simulation library.
//!
//! Provides encoding, conventional successive-cancellation (SC) and
//! CRC-aided SC-list (SCL) decoding, and parallel variants of both in
//! which `M = 2^m` component decoders of block size `N/M` run in
//! lockstep and resolve their correlated bits through a joint decision
//! once per step. The parallel decoders walk `N/M` sequential steps
//! instead of `N` while keeping the error-rate performance of the
//! conventional decoders; the [`sim`] module estimates BER/FER over a
//! BPSK/AWGN channel and checks that parity statistically.
//!
//! Module map:
//!
//! * [`word`] — bit and LLR vector types.
//! * [`kernel`] — bit-reversal, polar transform, dense generator
//!   oracle, and the M-way block decomposition of the transform.
//! * [`code`] — frozen-set construction, CRC handling, [`code::CodeSpec`].
//! * [`channel`] — BPSK modulation, seeded AWGN, channel LLRs.
//! * [`sc`] / [`scl`] — conventional decoders.
//! * [`parallel_sc`] / [`parallel_scl`] — M-component decoders.
//! * [`sim`] — Monte-Carlo sweeps, decoder parity comparison, reports.

pub mod channel;
pub mod code;
pub mod kernel;
pub mod parallel_sc;
pub mod parallel_scl;
pub mod sc;
pub mod scl;
pub mod sim;
pub mod word;

/// Saturation bound applied to every stored LLR.
///
/// Combines are clamped to `±LLR_SAT` so the exact (tanh-domain) rule
/// stays numerically stable; at double precision a magnitude of 40
/// already decides the bit with certainty.
pub const LLR_SAT: f64 = 40.0;

/// Errors reported by codec construction, encoding and decoding.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },
    #[error("transform order n={n} exceeds the supported limit {limit}")]
    SizeLimit { n: usize, limit: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("unsupported component count M={m} (expected one of {allowed})")]
    InvalidComponentCount { m: usize, allowed: &'static str },
    #[error("list size {list_size} is not a power of two >= 1")]
    InvalidListSize { list_size: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bit value {value} at position {index} is not 0 or 1")]
    NotABit { index: usize, value: u8 },
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
