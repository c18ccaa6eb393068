//! Parallel SC-list decoding with `M ∈ {2, 4}` component list
//! decoders.
//!
//! A combined path bundles one sub-path per component plus the sum of
//! the component path metrics. At each joint step every surviving
//! combined path spawns one child per admissible assignment of the
//! step's information bits (`2^w` children, component bits derived
//! through the block transform); if the population exceeds the
//! threshold, the best combined paths are kept and re-split into
//! per-component sub-paths.

use crate::code::CodeSpec;
use crate::kernel::{build_layout, component_bits, inverse_block_transform};
use crate::parallel_sc::JointGroup;
use crate::scl::{
    adaptive_decode_with, path_metric_update, AdaptiveDecodeResult, Candidate, ListDecodeResult,
};
use crate::sc::{CombineMode, ScEngine};
use crate::word::{BitWord, LlrWord};
use crate::{Error, Result};

/// One hypothesis of the parallel list decoder: `M` per-component
/// sub-paths, their metrics, and the component engine states.
#[derive(Debug, Clone)]
pub struct CombinedPath {
    sub_histories: Vec<Vec<u8>>,
    component_metrics: Vec<f64>,
    combined_metric: f64,
    engines: Vec<ScEngine>,
}

impl CombinedPath {
    /// Fresh root path over the `M` channel segments.
    pub fn root(segments: &[&[f64]], mode: CombineMode) -> Result<Self> {
        let m = segments.len();
        let engines: Vec<ScEngine> = segments
            .iter()
            .map(|s| ScEngine::new(s, mode))
            .collect::<Result<_>>()?;
        Ok(Self {
            sub_histories: vec![Vec::new(); m],
            component_metrics: vec![0.0; m],
            combined_metric: 0.0,
            engines,
        })
    }

    pub fn m(&self) -> usize {
        self.engines.len()
    }

    /// Per-component decided bits so far.
    pub fn sub_histories(&self) -> &[Vec<u8>] {
        &self.sub_histories
    }

    pub fn component_metrics(&self) -> &[f64] {
        &self.component_metrics
    }

    /// Sum of the component path metrics.
    pub fn combined_metric(&self) -> f64 {
        self.combined_metric
    }

    /// Decision LLRs of the `M` components at the current step.
    pub fn component_llrs(&mut self) -> Vec<f64> {
        self.engines.iter_mut().map(|e| e.decision_llr()).collect()
    }

    fn fg_ops(&self) -> u64 {
        self.engines.iter().map(|e| e.fg_ops()).sum()
    }

    /// Extends every component with its bit from `bits`, updating the
    /// component metrics against `llrs` and resumming the combined
    /// metric.
    fn push(&mut self, bits: &[u8], llrs: &[f64]) {
        for j in 0..self.m() {
            self.component_metrics[j] =
                path_metric_update(self.component_metrics[j], llrs[j], bits[j]);
            self.sub_histories[j].push(bits[j]);
            self.engines[j].feed(bits[j]);
        }
        self.combined_metric = self.component_metrics.iter().sum();
    }

    fn history_cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Concatenated sub-path comparison; sub-paths share lengths, so
        // component-major comparison equals comparing the concatenation.
        self.sub_histories.cmp(&other.sub_histories)
    }
}

/// Extends every combined path with each admissible assignment of the
/// group's information bits: `2^w` children per path, in (path order,
/// assignment order); a group of frozen bits only (`w = 0`) extends
/// paths in place.
///
/// `component_llrs[p]` carries the `M` decision LLRs of path `p` at
/// this step.
pub fn extend_combined_paths(
    paths: Vec<CombinedPath>,
    component_llrs: &[Vec<f64>],
    group: &JointGroup,
) -> Vec<CombinedPath> {
    debug_assert_eq!(paths.len(), component_llrs.len());
    let assignments: Vec<Vec<u8>> = group
        .v_assignments()
        .map(|v| component_bits(&v))
        .collect();
    let mut out = Vec::with_capacity(paths.len() * assignments.len());
    let (last, head) = assignments.split_last().expect("at least one assignment");
    for (path, llrs) in paths.into_iter().zip(component_llrs) {
        for bits in head {
            let mut child = path.clone();
            child.push(bits, llrs);
            out.push(child);
        }
        // The final assignment reuses the parent's storage.
        let mut child = path;
        child.push(last, llrs);
        out.push(child);
    }
    out
}

/// Keeps the `l_max` best combined paths when the population exceeds
/// the threshold; metric ties break towards the lexicographically
/// smaller concatenated sub-paths. Below the threshold the population
/// is returned unchanged.
pub fn prune_combined(mut paths: Vec<CombinedPath>, l_max: usize) -> Vec<CombinedPath> {
    if paths.len() <= l_max {
        return paths;
    }
    paths.sort_by(|a, b| {
        a.combined_metric
            .total_cmp(&b.combined_metric)
            .then_with(|| a.history_cmp(b))
    });
    paths.truncate(l_max);
    paths
}

fn validate_parallel_m(m: usize) -> Result<()> {
    match m {
        2 | 4 => Ok(()),
        _ => Err(Error::InvalidComponentCount { m, allowed: "2, 4" }),
    }
}

/// Decodes one frame with `M` component list decoders in lockstep,
/// pruning the combined population to `l_max` once per joint step.
pub fn parallel_scl_decode(
    channel_llrs: &LlrWord,
    spec: &CodeSpec,
    m: usize,
    l_max: usize,
    mode: CombineMode,
) -> Result<ListDecodeResult> {
    validate_parallel_m(m)?;
    if l_max == 0 || !l_max.is_power_of_two() {
        return Err(Error::InvalidListSize { list_size: l_max });
    }
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
    let segments: Vec<&[f64]> = (0..m)
        .map(|j| &channel_llrs.as_slice()[j * block_len..(j + 1) * block_len])
        .collect();

    let mut paths = vec![CombinedPath::root(&segments, mode)?];
    let mut fg_ops = 0u64;
    let mut peak_population = 1usize;

    for step in 0..block_len {
        let group = JointGroup::for_step(spec, &layout, step);
        let llrs: Vec<Vec<f64>> = paths
            .iter_mut()
            .map(|p| {
                let before = p.fg_ops();
                let l = p.component_llrs();
                fg_ops += p.fg_ops() - before;
                l
            })
            .collect();
        paths = extend_combined_paths(paths, &llrs, &group);
        peak_population = peak_population.max(paths.len());
        paths = prune_combined(paths, l_max);
    }

    // Map each combined path back to a u-domain candidate.
    let mut candidates: Vec<Candidate> = paths
        .iter()
        .map(|p| {
            let mut u_hat = BitWord::zeros(code_len);
            let mut tuple = vec![0u8; m];
            for i in 0..block_len {
                for (j, t) in tuple.iter_mut().enumerate() {
                    *t = p.sub_histories[j][i];
                }
                let v_bits = inverse_block_transform(&tuple);
                for (j, &v) in v_bits.iter().enumerate() {
                    u_hat.set(layout.u_index(j, i), v);
                }
            }
            Candidate {
                bit_history: u_hat,
                metric: p.combined_metric,
            }
        })
        .collect();
    candidates.sort_by(|a, b| {
        a.metric
            .total_cmp(&b.metric)
            .then_with(|| a.bit_history.cmp(&b.bit_history))
    });

    Ok(ListDecodeResult {
        candidates,
        selected: 0,
        used_list_size: l_max,
        sequential_steps: block_len as u64,
        fg_ops,
        peak_population,
    })
}

/// Adaptive CRC-aided wrapper over [`parallel_scl_decode`], doubling
/// the threshold from 1 up to `l_max` until the CRC accepts.
pub fn adaptive_parallel_scl_decode(
    channel_llrs: &LlrWord,
    spec: &CodeSpec,
    m: usize,
    l_max: usize,
    mode: CombineMode,
) -> Result<AdaptiveDecodeResult> {
    validate_parallel_m(m)?;
    adaptive_decode_with(spec, l_max, 1, |list_size| {
        parallel_scl_decode(channel_llrs, spec, m, list_size, mode)
    })
}
