//! Successive-cancellation list decoding with CRC-aided selection and
//! an adaptive list-size wrapper.
//!
//! Paths carry an LLR-domain metric: extending a path with bit `b`
//! against decision LLR `L` adds `ln(1 + exp(-(1-2b) L))`, which is
//! near zero when the bit agrees with the LLR sign and near `|L|` when
//! it disagrees. For complete paths the metric orders candidates
//! exactly as their likelihoods when the exact combine rule is used.

use crate::code::CodeSpec;
use crate::sc::{CombineMode, ScEngine};
use crate::word::{BitWord, LlrWord};
use crate::{Error, Result};

/// Numerically stable `ln(1 + exp(x))`.
#[inline]
pub(crate) fn log1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Path-metric update: adds the softplus penalty for deciding `bit`
/// against decision LLR `llr`.
#[inline]
pub fn path_metric_update(metric: f64, llr: f64, bit: u8) -> f64 {
    let agreement = if bit == 0 { llr } else { -llr };
    metric + log1p_exp(-agreement)
}

/// One list-decoder hypothesis: bit history, accumulated metric, and
/// the scratch planes of its successive-cancellation engine.
#[derive(Debug, Clone)]
pub struct DecoderPath {
    pub(crate) history: Vec<u8>,
    pub(crate) metric: f64,
    pub(crate) engine: ScEngine,
}

impl DecoderPath {
    pub fn bit_history(&self) -> &[u8] {
        &self.history
    }

    pub fn metric(&self) -> f64 {
        self.metric
    }
}

/// Final list-decoder candidate.
#[derive(Debug, Clone)]
pub struct Candidate {
    /// Decided `u` word.
    pub bit_history: BitWord,
    /// Accumulated path metric (lower is better).
    pub metric: f64,
}

/// Result of one list decode.
#[derive(Debug, Clone)]
pub struct ListDecodeResult {
    /// Surviving candidates, ascending by metric (ties broken towards
    /// the lexicographically smaller history).
    pub candidates: Vec<Candidate>,
    /// Index of the chosen candidate; 0 until CRC selection moves it.
    pub selected: usize,
    /// List size the decode ran with.
    pub used_list_size: usize,
    /// Length of the sequential decision chain (`N` here).
    pub sequential_steps: u64,
    /// Total f/g evaluations across all paths.
    pub fg_ops: u64,
    /// Largest path population seen before pruning.
    pub peak_population: usize,
}

fn validate_list_size(list_size: usize) -> Result<()> {
    if list_size == 0 || !list_size.is_power_of_two() {
        return Err(Error::InvalidListSize { list_size });
    }
    Ok(())
}

/// Compares `(metric, history)` with the deterministic tie rule:
/// strictly smaller metric first, equal metrics by lexicographically
/// smaller bit history.
fn candidate_order(a_metric: f64, a_history: &[u8], b_metric: f64, b_history: &[u8]) -> std::cmp::Ordering {
    a_metric
        .total_cmp(&b_metric)
        .then_with(|| a_history.cmp(b_history))
}

/// Decodes one frame keeping up to `list_size` paths.
pub fn scl_decode(
    channel_llrs: &LlrWord,
    spec: &CodeSpec,
    list_size: usize,
    mode: CombineMode,
) -> Result<ListDecodeResult> {
    validate_list_size(list_size)?;
    let code_len = spec.block_len();
    if channel_llrs.len() != code_len {
        return Err(Error::LengthMismatch {
            expected: code_len,
            actual: channel_llrs.len(),
        });
    }

    let mut fg_ops = 0u64;
    let mut peak_population = 1usize;
    let mut paths = vec![DecoderPath {
        history: Vec::with_capacity(code_len),
        metric: 0.0,
        engine: ScEngine::new(channel_llrs.as_slice(), mode)?,
    }];

    for i in 0..code_len {
        // Decision LLR per surviving path.
        let llrs: Vec<f64> = paths
            .iter_mut()
            .map(|p| {
                let before = p.engine.fg_ops();
                let llr = p.engine.decision_llr();
                fg_ops += p.engine.fg_ops() - before;
                llr
            })
            .collect();

        if spec.is_frozen(i) {
            for (p, &llr) in paths.iter_mut().zip(&llrs) {
                p.metric = path_metric_update(p.metric, llr, 0);
                p.history.push(0);
                p.engine.feed(0);
            }
            continue;
        }

        // Fork every path into both extensions, then keep the best.
        let mut order: Vec<(usize, u8, f64)> = Vec::with_capacity(2 * paths.len());
        for (idx, (p, &llr)) in paths.iter().zip(&llrs).enumerate() {
            order.push((idx, 0, path_metric_update(p.metric, llr, 0)));
            order.push((idx, 1, path_metric_update(p.metric, llr, 1)));
        }
        peak_population = peak_population.max(order.len());
        if order.len() > list_size {
            order.sort_by(|a, b| {
                a.2.total_cmp(&b.2).then_with(|| {
                    // Histories are equal-length; children differ from
                    // their parents only in the appended bit.
                    paths[a.0]
                        .history
                        .cmp(&paths[b.0].history)
                        .then(a.1.cmp(&b.1))
                })
            });
            order.truncate(list_size);
            // Restore parent-major order so same-parent survivors stay
            // adjacent for the engine hand-off below.
            order.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        }

        let mut parents: Vec<Option<DecoderPath>> = paths.into_iter().map(Some).collect();
        let mut next = Vec::with_capacity(order.len());
        for j in 0..order.len() {
            let (parent_idx, bit, metric) = order[j];
            let last_of_parent = j + 1 >= order.len() || order[j + 1].0 != parent_idx;
            let parent = parents[parent_idx]
                .as_ref()
                .expect("parent still available");
            let mut path = if last_of_parent {
                parents[parent_idx].take().unwrap()
            } else {
                parent.clone()
            };
            path.metric = metric;
            path.history.push(bit);
            path.engine.feed(bit);
            next.push(path);
        }
        paths = next;
    }

    let mut candidates: Vec<Candidate> = paths
        .into_iter()
        .map(|p| Candidate {
            bit_history: BitWord::from_bits(p.history).expect("bits"),
            metric: p.metric,
        })
        .collect();
    candidates.sort_by(|a, b| {
        candidate_order(
            a.metric,
            a.bit_history.as_slice(),
            b.metric,
            b.bit_history.as_slice(),
        )
    });

    Ok(ListDecodeResult {
        candidates,
        selected: 0,
        used_list_size: list_size,
        sequential_steps: code_len as u64,
        fg_ops,
        peak_population,
    })
}

/// Index of the lowest-metric candidate whose information bits pass
/// the spec's CRC; `None` if no candidate passes.
///
/// Candidates are already metric-sorted, so the first hit wins
/// regardless of its rank among CRC-invalid candidates.
pub fn crc_select(result: &ListDecodeResult, spec: &CodeSpec) -> Option<usize> {
    result.candidates.iter().position(|c| {
        spec.info_passes_crc(&spec.info_of_u(&c.bit_history))
            .unwrap_or(false)
    })
}

/// Outcome of an adaptive list decode.
#[derive(Debug, Clone)]
pub struct AdaptiveDecodeResult {
    /// Decided `u` word of the selected candidate.
    pub u_hat: BitWord,
    /// Information bits of the selected candidate.
    pub info_bits: BitWord,
    /// Whether the selected candidate passed the CRC.
    pub crc_ok: bool,
    /// List size of the pass that produced the output.
    pub used_list_size: usize,
    /// Sequential steps of one pass.
    pub sequential_steps: u64,
    /// f/g evaluations summed over all passes.
    pub fg_ops: u64,
}

/// Shared adaptive wrapper: doubles the list size until the CRC picks
/// a candidate or `l_max` is reached; on total failure returns the
/// best-metric candidate of the final pass.
pub(crate) fn adaptive_decode_with(
    spec: &CodeSpec,
    l_max: usize,
    start_list_size: usize,
    mut decode: impl FnMut(usize) -> Result<ListDecodeResult>,
) -> Result<AdaptiveDecodeResult> {
    validate_list_size(l_max)?;
    validate_list_size(start_list_size)?;
    if spec.crc().is_none() {
        return Err(Error::InvalidParameter(
            "adaptive decoding requires a CRC-bearing spec".into(),
        ));
    }
    if start_list_size > l_max {
        return Err(Error::InvalidParameter(format!(
            "start list size {start_list_size} exceeds L_max {l_max}"
        )));
    }
    let mut fg_ops = 0u64;
    let mut list_size = start_list_size;
    loop {
        let mut result = decode(list_size)?;
        fg_ops += result.fg_ops;
        let selection = crc_select(&result, spec);
        if let Some(idx) = selection {
            result.selected = idx;
            let u_hat = result.candidates[idx].bit_history.clone();
            let info_bits = spec.info_of_u(&u_hat);
            return Ok(AdaptiveDecodeResult {
                u_hat,
                info_bits,
                crc_ok: true,
                used_list_size: list_size,
                sequential_steps: result.sequential_steps,
                fg_ops,
            });
        }
        if list_size >= l_max {
            let u_hat = result.candidates[0].bit_history.clone();
            let info_bits = spec.info_of_u(&u_hat);
            return Ok(AdaptiveDecodeResult {
                u_hat,
                info_bits,
                crc_ok: false,
                used_list_size: l_max,
                sequential_steps: result.sequential_steps,
                fg_ops,
            });
        }
        list_size *= 2;
    }
}

/// Adaptive CRC-aided list decode: runs `scl_decode` at list sizes
/// `1, 2, 4, ...` until the CRC accepts a candidate or `l_max` is hit.
pub fn adaptive_scl_decode(
    channel_llrs: &LlrWord,
    spec: &CodeSpec,
    l_max: usize,
    mode: CombineMode,
) -> Result<AdaptiveDecodeResult> {
    adaptive_decode_with(spec, l_max, 1, |list_size| {
        scl_decode(channel_llrs, spec, list_size, mode)
    })
}
