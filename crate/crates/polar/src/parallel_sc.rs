//! Parallel successive-cancellation decoding with `M` component
//! decoders.
//!
//! The received word is split into `M` contiguous segments, one
//! per component decoder of block size `N/M`. At each joint step the
//! components report their decision LLRs independently; the `M`
//! correlated component bits are then resolved together by maximising
//! the equally combined score `sum_j (1-2 bit_j) L_j` over all
//! assignments of the step's information bits, and each component is
//! fed its decided bit. The sequential chain shortens from `N` to
//! `N/M` steps.

use crate::code::CodeSpec;
use crate::kernel::{build_layout, component_bits, ParallelLayout};
use crate::sc::{CombineMode, ScDecodeResult, ScEngine};
use crate::word::{BitWord, LlrWord};
use crate::{Error, Result};

/// The `M` positions decided together at one joint step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointGroup {
    /// Step index within the component blocks.
    pub step: usize,
    /// The `M` v-domain positions `(v_i, v_{i+N/M}, ...)`.
    pub v_positions: Vec<usize>,
    /// The matching `u`-domain positions.
    pub u_positions: Vec<usize>,
    /// Frozen flags in v-position order (1 = frozen).
    pub frozen_pattern: Vec<u8>,
}

impl JointGroup {
    /// Builds the group for joint step `step` of the given layout.
    pub fn for_step(spec: &CodeSpec, layout: &ParallelLayout, step: usize) -> Self {
        let m = layout.m();
        let v_positions = layout.joint_group(step);
        let u_positions: Vec<usize> = (0..m).map(|j| layout.u_index(j, step)).collect();
        let frozen_pattern: Vec<u8> = u_positions
            .iter()
            .map(|&u| spec.is_frozen(u) as u8)
            .collect();
        Self {
            step,
            v_positions,
            u_positions,
            frozen_pattern,
        }
    }

    pub fn m(&self) -> usize {
        self.frozen_pattern.len()
    }

    /// Number of information bits in the group.
    pub fn info_count(&self) -> usize {
        self.frozen_pattern.iter().filter(|&&f| f == 0).count()
    }

    /// Enumerates the `2^w` admissible v-assignments in lexicographic
    /// order of the v-tuple (frozen positions fixed at zero).
    pub fn v_assignments(&self) -> VAssignments<'_> {
        VAssignments {
            group: self,
            next: 0,
            total: 1usize << self.info_count(),
        }
    }
}

/// Iterator over the admissible v-bit tuples of a joint group.
pub struct VAssignments<'a> {
    group: &'a JointGroup,
    next: usize,
    total: usize,
}

impl Iterator for VAssignments<'_> {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        if self.next >= self.total {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        let w = self.group.info_count();
        let mut bit_index = 0usize;
        let tuple = self
            .group
            .frozen_pattern
            .iter()
            .map(|&frozen| {
                if frozen == 1 {
                    0
                } else {
                    // First information slot takes the mask's MSB so the
                    // enumeration ascends lexicographically in v order.
                    let b = ((mask >> (w - 1 - bit_index)) & 1) as u8;
                    bit_index += 1;
                    b
                }
            })
            .collect();
        Some(tuple)
    }
}

/// Outcome of one joint decision.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDecision {
    /// Decided v bits, in v-position order.
    pub v_bits: Vec<u8>,
    /// Matching component bits `(a, b, ...)`.
    pub component_bits: Vec<u8>,
    /// Score assignments evaluated (`2^w`).
    pub evaluations: u64,
}

/// Decision LLRs of `M` synchronized component engines at joint step
/// `step`, computed independently per component.
pub fn component_llrs(engines: &mut [ScEngine], step: usize) -> Result<Vec<f64>> {
    for e in engines.iter() {
        if e.step() != step {
            return Err(Error::InvalidParameter(format!(
                "component decoder desynchronized: at step {}, expected {step}",
                e.step()
            )));
        }
    }
    Ok(engines.iter_mut().map(|e| e.decision_llr()).collect())
}

/// Resolves one joint group: exhaustively scores every admissible
/// v-assignment with `sum_j (1-2 bit_j) L_j` and keeps the maximiser,
/// ties broken towards the lexicographically smallest v-assignment.
pub fn joint_decide(llrs: &[f64], group: &JointGroup) -> JointDecision {
    debug_assert_eq!(llrs.len(), group.m());
    let mut best: Option<(f64, Vec<u8>, Vec<u8>)> = None;
    let mut evaluations = 0u64;
    for v_bits in group.v_assignments() {
        let comp = component_bits(&v_bits);
        let score: f64 = comp
            .iter()
            .zip(llrs)
            .map(|(&b, &l)| if b == 0 { l } else { -l })
            .sum();
        evaluations += 1;
        // Strict inequality keeps the earliest (lexicographically
        // smallest) maximiser.
        if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
            best = Some((score, v_bits, comp));
        }
    }
    let (_, v_bits, component) = best.expect("at least one assignment");
    JointDecision {
        v_bits,
        component_bits: component,
        evaluations,
    }
}

/// Decodes one frame with `M` component SC decoders in lockstep.
pub fn parallel_sc_decode(
    channel_llrs: &LlrWord,
    spec: &CodeSpec,
    m: usize,
    mode: CombineMode,
) -> Result<ScDecodeResult> {
    let code_len = spec.block_len();
    if channel_llrs.len() != code_len {
        return Err(Error::LengthMismatch {
            expected: code_len,
            actual: channel_llrs.len(),
        });
    }
    if m > code_len / 2 {
        return Err(Error::InvalidParameter(format!(
            "M={m} exceeds N/2 = {}",
            code_len / 2
        )));
    }
    let layout = build_layout(code_len, m)?;
    let block_len = layout.block_len();
    let mut engines: Vec<ScEngine> = (0..m)
        .map(|j| {
            ScEngine::new(
                &channel_llrs.as_slice()[j * block_len..(j + 1) * block_len],
                mode,
            )
        })
        .collect::<Result<_>>()?;

    let mut u_hat = BitWord::zeros(code_len);
    let mut decision_llrs = vec![0.0; code_len];
    for step in 0..block_len {
        let group = JointGroup::for_step(spec, &layout, step);
        let llrs = component_llrs(&mut engines, step)?;
        let decision = joint_decide(&llrs, &group);
        debug_assert!(decision.evaluations <= 1 << m);
        for j in 0..m {
            engines[j].feed(decision.component_bits[j]);
            let u_index = group.u_positions[j];
            u_hat.set(u_index, decision.v_bits[j]);
            decision_llrs[u_index] = llrs[j];
        }
    }

    let info_bits = spec.info_of_u(&u_hat);
    Ok(ScDecodeResult {
        u_hat,
        info_bits,
        decision_llrs: LlrWord::new(decision_llrs),
        sequential_steps: block_len as u64,
        fg_ops: engines.iter().map(|e| e.fg_ops()).sum(),
    })
}
