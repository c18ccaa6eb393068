//! Conventional successive-cancellation decoding.
//!
//! [`ScEngine`] walks the depth-`n` computation tree one leaf at a
//! time: `decision_llr` produces the decision LLR for the next `u`
//! position and `feed` commits a bit and updates the partial sums.
//! Splitting the walk this way lets the list and parallel decoders
//! drive several engines in lockstep and inject decisions from
//! outside. Storage is one LLR plane and one partial-sum plane per
//! tree depth, `O(N)` in total.

use serde::{Deserialize, Serialize};

use crate::code::CodeSpec;
use crate::kernel::bit_reverse;
use crate::word::{BitWord, LlrWord};
use crate::{Error, Result, LLR_SAT};

/// Check-node combining rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    /// Exact rule `2 atanh(tanh(a/2) tanh(b/2))`.
    #[default]
    Exact,
    /// Min-sum approximation `sign(a) sign(b) min(|a|, |b|)`.
    MinSum,
}

#[inline]
fn clamp_llr(x: f64) -> f64 {
    x.clamp(-LLR_SAT, LLR_SAT)
}

/// Check-node update of two LLRs, saturated at `±LLR_SAT`.
#[inline]
pub fn f_combine(l1: f64, l2: f64, mode: CombineMode) -> f64 {
    match mode {
        CombineMode::Exact => {
            let t = (0.5 * l1).tanh() * (0.5 * l2).tanh();
            clamp_llr(2.0 * t.atanh())
        }
        CombineMode::MinSum => {
            let sign = if (l1 < 0.0) != (l2 < 0.0) { -1.0 } else { 1.0 };
            clamp_llr(sign * l1.abs().min(l2.abs()))
        }
    }
}

/// Variable-node update `l2 + (1 - 2 u) l1`, saturated at `±LLR_SAT`.
#[inline]
pub fn g_combine(l1: f64, l2: f64, u_hat: u8) -> f64 {
    let signed = if u_hat == 0 { l1 } else { -l1 };
    clamp_llr(l2 + signed)
}

/// Stepwise successive-cancellation engine over one LLR segment.
///
/// Call order per position: [`decision_llr`](Self::decision_llr) then
/// [`feed`](Self::feed), for positions `0..block_len` in order.
#[derive(Debug, Clone)]
pub struct ScEngine {
    stages: usize,
    block_len: usize,
    mode: CombineMode,
    /// LLR planes, flat: plane `d` at `2N - (2N >> d)`, length `N >> d`.
    llr: Vec<f64>,
    /// Partial-sum planes with the same layout; plane `d` assembles the
    /// re-encoded word of the active depth-`d` node.
    sums: Vec<u8>,
    step: usize,
    llr_ready: bool,
    fg_ops: u64,
}

impl ScEngine {
    /// Engine over the channel LLRs of one codeword, given in codeword
    /// order.
    ///
    /// The generator carries the bit-reversal permutation; undoing it
    /// here lets every depth pair adjacent half-planes, and positions
    /// are then decided in natural `u` order.
    pub fn new(channel_llrs: &[f64], mode: CombineMode) -> Result<Self> {
        let block_len = channel_llrs.len();
        if !block_len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len: block_len });
        }
        let stages = block_len.trailing_zeros() as usize;
        let mut llr = vec![0.0; 2 * block_len - 1];
        for (i, v) in llr[..block_len].iter_mut().enumerate() {
            *v = channel_llrs[bit_reverse(i, stages)];
        }
        Ok(Self {
            stages,
            block_len,
            mode,
            llr,
            sums: vec![0u8; 2 * block_len - 1],
            step: 0,
            llr_ready: false,
            fg_ops: 0,
        })
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Next undecided position.
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.step == self.block_len
    }

    /// Count of f/g evaluations so far.
    pub fn fg_ops(&self) -> u64 {
        self.fg_ops
    }

    #[inline]
    fn plane(&self, d: usize) -> usize {
        2 * self.block_len - ((2 * self.block_len) >> d)
    }

    /// Decision LLR for the current position. Idempotent until `feed`.
    pub fn decision_llr(&mut self) -> f64 {
        assert!(!self.is_done(), "all positions already decided");
        if !self.llr_ready {
            let phi = self.step;
            let n = self.stages;
            let first = if phi == 0 {
                1
            } else {
                n - phi.trailing_zeros() as usize
            };
            for d in first..=n {
                let parent = self.plane(d - 1);
                let child = self.plane(d);
                let half = self.block_len >> d;
                if (phi >> (n - d)) & 1 == 0 {
                    for i in 0..half {
                        self.llr[child + i] = f_combine(
                            self.llr[parent + i],
                            self.llr[parent + half + i],
                            self.mode,
                        );
                    }
                } else {
                    for i in 0..half {
                        self.llr[child + i] = g_combine(
                            self.llr[parent + i],
                            self.llr[parent + half + i],
                            self.sums[parent + i],
                        );
                    }
                }
                self.fg_ops += half as u64;
            }
            self.llr_ready = true;
        }
        self.llr[self.plane(self.stages)]
    }

    /// Commits the decision for the current position and propagates
    /// partial sums. The position's LLR must have been computed first;
    /// later g-updates read planes refreshed by that pass.
    pub fn feed(&mut self, bit: u8) {
        assert!(!self.is_done(), "all positions already decided");
        assert!(self.llr_ready, "feed before decision_llr");
        debug_assert!(bit <= 1);
        let n = self.stages;
        let leaf = self.plane(n);
        self.sums[leaf] = bit & 1;
        let mut d = n;
        let mut node = self.step;
        while d > 0 {
            let len = self.block_len >> d;
            let parent = self.plane(d - 1);
            let child = self.plane(d);
            if node & 1 == 1 {
                // Right child: fold into the parent's assembled word.
                for i in 0..len {
                    self.sums[parent + i] ^= self.sums[child + i];
                    self.sums[parent + len + i] = self.sums[child + i];
                }
                d -= 1;
                node >>= 1;
            } else {
                // Left child: stash for the sibling's g computation.
                for i in 0..len {
                    self.sums[parent + i] = self.sums[child + i];
                }
                break;
            }
        }
        self.step += 1;
        self.llr_ready = false;
    }
}

/// Output of one successive-cancellation decode.
#[derive(Debug, Clone)]
pub struct ScDecodeResult {
    /// Full decided `u` word; frozen positions are zero.
    pub u_hat: BitWord,
    /// Information bits of `u_hat`, in increasing `u`-index order.
    pub info_bits: BitWord,
    /// Decision LLR observed at every `u` position.
    pub decision_llrs: LlrWord,
    /// Length of the sequential decision chain (`N` here).
    pub sequential_steps: u64,
    /// Total f/g evaluations spent.
    pub fg_ops: u64,
}

/// Decodes one frame with conventional successive cancellation.
///
/// Frozen positions are forced to zero; information bits use the
/// threshold rule `LLR >= 0 -> 0`.
pub fn sc_decode(
    channel_llrs: &LlrWord,
    spec: &CodeSpec,
    mode: CombineMode,
) -> Result<ScDecodeResult> {
    let code_len = spec.block_len();
    if channel_llrs.len() != code_len {
        return Err(Error::LengthMismatch {
            expected: code_len,
            actual: channel_llrs.len(),
        });
    }
    let mut engine = ScEngine::new(channel_llrs.as_slice(), mode)?;
    let mut u_hat = BitWord::zeros(code_len);
    let mut llrs = Vec::with_capacity(code_len);
    for i in 0..code_len {
        let llr = engine.decision_llr();
        llrs.push(llr);
        let bit = if spec.is_frozen(i) {
            0
        } else {
            (llr < 0.0) as u8
        };
        u_hat.set(i, bit);
        engine.feed(bit);
    }
    let info_bits = spec.info_of_u(&u_hat);
    Ok(ScDecodeResult {
        u_hat,
        info_bits,
        decision_llrs: LlrWord::new(llrs),
        sequential_steps: code_len as u64,
        fg_ops: engine.fg_ops(),
    })
}
