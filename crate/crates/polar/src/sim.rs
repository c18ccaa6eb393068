//! Monte-Carlo BER/FER estimation, decoder parity comparison, and
//! report serialization.
//!
//! Frames are seeded individually from `(master_seed, snr_db,
//! frame_index)` and processed in fixed-size batches, so a sweep is
//! reproducible bit-for-bit regardless of the worker count; early
//! stopping is evaluated only at batch boundaries. Comparisons decode
//! the same channel realization with every decoder and score the
//! frame-error discordance with a paired z-statistic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{channel_llrs, frame_rng, modulate_bpsk, transmit_with, ChannelModel, SnrConvention};
use crate::code::CodeSpec;
use crate::parallel_sc::parallel_sc_decode;
use crate::parallel_scl::{adaptive_parallel_scl_decode, parallel_scl_decode};
use crate::sc::{sc_decode, CombineMode};
use crate::scl::{adaptive_scl_decode, crc_select, scl_decode};
use crate::word::{BitWord, LlrWord};
use crate::{Error, Result};
use rand::Rng;

/// Frames evaluated between early-stop checks; fixed so results do not
/// depend on the worker count.
const FRAME_BATCH: u64 = 256;

/// Decoder selection plus parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoderConfig {
    Sc {
        #[serde(default)]
        mode: CombineMode,
    },
    Scl {
        list_size: usize,
        #[serde(default)]
        adaptive: bool,
        #[serde(default)]
        mode: CombineMode,
    },
    Psc {
        m: usize,
        #[serde(default)]
        mode: CombineMode,
    },
    Pscl {
        m: usize,
        list_size: usize,
        #[serde(default)]
        adaptive: bool,
        #[serde(default)]
        mode: CombineMode,
    },
}

impl DecoderConfig {
    /// Short label used in parity tables.
    pub fn label(&self) -> String {
        match self {
            DecoderConfig::Sc { .. } => "sc".into(),
            DecoderConfig::Psc { m, .. } => format!("psc_m{m}"),
            DecoderConfig::Scl {
                list_size,
                adaptive,
                ..
            } => format!(
                "scl_l{list_size}{}",
                if *adaptive { "_adaptive" } else { "" }
            ),
            DecoderConfig::Pscl {
                m,
                list_size,
                adaptive,
                ..
            } => format!(
                "pscl_m{m}_l{list_size}{}",
                if *adaptive { "_adaptive" } else { "" }
            ),
        }
    }
}

/// One Monte-Carlo run: code, decoder, SNR points and stopping rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub spec: CodeSpec,
    pub decoder: DecoderConfig,
    pub snr_points_db: Vec<f64>,
    #[serde(default)]
    pub snr_convention: SnrConvention,
    pub max_frames: u64,
    /// Frame errors after which a point stops early; 0 disables.
    pub max_errors: u64,
    pub master_seed: u64,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.max_frames == 0 {
            return Err(Error::InvalidParameter("max_frames must be >= 1".into()));
        }
        if self.snr_points_db.is_empty() {
            return Err(Error::InvalidParameter("empty SNR point list".into()));
        }
        Ok(())
    }

    fn model(&self, snr_db: f64) -> ChannelModel {
        ChannelModel::new(snr_db, self.snr_convention, self.spec.rate())
    }
}

/// Decoded frame, reduced to what the harness and CLI need.
#[derive(Debug, Clone)]
pub struct DecodedFrame {
    /// Payload estimate (CRC field stripped when present).
    pub payload: BitWord,
    /// CRC verdict of the selected candidate; `None` without a CRC.
    pub crc_ok: Option<bool>,
    pub used_list_size: usize,
    pub sequential_steps: u64,
    pub fg_ops: u64,
}

/// Runs the configured decoder on one frame of channel LLRs.
pub fn decode_with(
    decoder: &DecoderConfig,
    spec: &CodeSpec,
    llrs: &LlrWord,
) -> Result<DecodedFrame> {
    match *decoder {
        DecoderConfig::Sc { mode } => {
            let res = sc_decode(llrs, spec, mode)?;
            Ok(DecodedFrame {
                crc_ok: spec.info_passes_crc(&res.info_bits),
                payload: spec.payload_of_info(&res.info_bits),
                used_list_size: 1,
                sequential_steps: res.sequential_steps,
                fg_ops: res.fg_ops,
            })
        }
        DecoderConfig::Psc { m, mode } => {
            let res = parallel_sc_decode(llrs, spec, m, mode)?;
            Ok(DecodedFrame {
                crc_ok: spec.info_passes_crc(&res.info_bits),
                payload: spec.payload_of_info(&res.info_bits),
                used_list_size: 1,
                sequential_steps: res.sequential_steps,
                fg_ops: res.fg_ops,
            })
        }
        DecoderConfig::Scl {
            list_size,
            adaptive,
            mode,
        } => {
            if adaptive {
                let res = adaptive_scl_decode(llrs, spec, list_size, mode)?;
                Ok(DecodedFrame {
                    crc_ok: Some(res.crc_ok),
                    payload: spec.payload_of_info(&res.info_bits),
                    used_list_size: res.used_list_size,
                    sequential_steps: res.sequential_steps,
                    fg_ops: res.fg_ops,
                })
            } else {
                let res = scl_decode(llrs, spec, list_size, mode)?;
                Ok(select_candidate(spec, res))
            }
        }
        DecoderConfig::Pscl {
            m,
            list_size,
            adaptive,
            mode,
        } => {
            if adaptive {
                let res = adaptive_parallel_scl_decode(llrs, spec, m, list_size, mode)?;
                Ok(DecodedFrame {
                    crc_ok: Some(res.crc_ok),
                    payload: spec.payload_of_info(&res.info_bits),
                    used_list_size: res.used_list_size,
                    sequential_steps: res.sequential_steps,
                    fg_ops: res.fg_ops,
                })
            } else {
                let res = parallel_scl_decode(llrs, spec, m, list_size, mode)?;
                Ok(select_candidate(spec, res))
            }
        }
    }
}

fn select_candidate(spec: &CodeSpec, result: crate::scl::ListDecodeResult) -> DecodedFrame {
    let (index, crc_ok) = match spec.crc() {
        Some(_) => match crc_select(&result, spec) {
            Some(i) => (i, Some(true)),
            None => (0, Some(false)),
        },
        None => (0, None),
    };
    let info = spec.info_of_u(&result.candidates[index].bit_history);
    DecodedFrame {
        payload: spec.payload_of_info(&info),
        crc_ok,
        used_list_size: result.used_list_size,
        sequential_steps: result.sequential_steps,
        fg_ops: result.fg_ops,
    }
}

/// Counters extracted from one simulated frame.
#[derive(Debug, Clone)]
pub struct FrameOutcome {
    pub bit_errors: u64,
    pub frame_error: bool,
    /// CRC verdict of the output; `None` without a CRC.
    pub crc_ok: Option<bool>,
    /// CRC accepted but the payload is wrong.
    pub undetected_error: bool,
    pub used_list_size: usize,
    pub sequential_steps: u64,
    pub fg_ops: u64,
}

/// Draws the frame's payload and channel LLRs from its private
/// generator. Identical `(master_seed, snr_db, frame_index)` triples
/// give identical realizations, independent of the decoder.
pub fn simulate_channel_frame(
    config: &SimConfig,
    snr_db: f64,
    frame_index: u64,
) -> Result<(BitWord, LlrWord)> {
    let mut rng = frame_rng(config.master_seed, snr_db, frame_index);
    let payload = BitWord::from_fn(config.spec.payload_len(), |_| rng.random_range(0..=1u8));
    let x = config.spec.encode_payload(&payload)?;
    let model = config.model(snr_db);
    let y = transmit_with(&modulate_bpsk(&x), &model, &mut rng);
    Ok((payload, channel_llrs(&y, &model)))
}

fn score_frame(payload: &BitWord, decoded: &DecodedFrame) -> FrameOutcome {
    let bit_errors = payload
        .iter()
        .zip(decoded.payload.iter())
        .filter(|(a, b)| a != b)
        .count() as u64;
    let frame_error = bit_errors > 0;
    FrameOutcome {
        bit_errors,
        frame_error,
        crc_ok: decoded.crc_ok,
        undetected_error: decoded.crc_ok == Some(true) && frame_error,
        used_list_size: decoded.used_list_size,
        sequential_steps: decoded.sequential_steps,
        fg_ops: decoded.fg_ops,
    }
}

/// Simulates a single frame end to end with the configured decoder.
pub fn run_frame(config: &SimConfig, snr_db: f64, frame_index: u64) -> Result<FrameOutcome> {
    let (payload, llrs) = simulate_channel_frame(config, snr_db, frame_index)?;
    let decoded = decode_with(&config.decoder, &config.spec, &llrs)?;
    Ok(score_frame(&payload, &decoded))
}

/// Per-SNR aggregate row; the fields are exactly the CSV columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrRow {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    /// 95% half-width of the FER estimate (rule of three at zero).
    pub fer_ci95: f64,
    /// Mean sequential steps per frame.
    pub seq_steps: f64,
    /// Mean f/g evaluations per frame.
    pub fg_ops: f64,
    pub mean_list_size: f64,
}

/// BER/FER estimates per SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub rows: Vec<SnrRow>,
}

pub const REPORT_CSV_HEADER: &str =
    "snr_db,frames,bit_errors,frame_errors,ber,fer,fer_ci95,seq_steps,fg_ops,mean_list_size";

impl SimReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.snr_db,
                r.frames,
                r.bit_errors,
                r.frame_errors,
                r.ber,
                r.fer,
                r.fer_ci95,
                r.seq_steps,
                r.fg_ops,
                r.mean_list_size
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == REPORT_CSV_HEADER => {}
            other => {
                return Err(Error::Parse(format!(
                    "bad report header: {other:?}"
                )))
            }
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 10 {
                return Err(Error::Parse(format!(
                    "row {} has {} fields, expected 10",
                    lineno + 2,
                    fields.len()
                )));
            }
            let fe = |i: usize| -> Result<f64> {
                fields[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 2)))
            };
            let ie = |i: usize| -> Result<u64> {
                fields[i]
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 2)))
            };
            rows.push(SnrRow {
                snr_db: fe(0)?,
                frames: ie(1)?,
                bit_errors: ie(2)?,
                frame_errors: ie(3)?,
                ber: fe(4)?,
                fer: fe(5)?,
                fer_ci95: fe(6)?,
                seq_steps: fe(7)?,
                fg_ops: fe(8)?,
                mean_list_size: fe(9)?,
            });
        }
        Ok(SimReport { rows })
    }
}

/// Report document with the generating configuration embedded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimReportJson {
    pub config: SimConfig,
    pub rows: Vec<SnrRow>,
}

pub fn report_json(config: &SimConfig, report: &SimReport) -> String {
    serde_json::to_string_pretty(&SimReportJson {
        config: config.clone(),
        rows: report.rows.clone(),
    })
    .expect("report serialization")
}

#[derive(Default, Clone)]
struct Accumulator {
    frames: u64,
    bit_errors: u64,
    frame_errors: u64,
    undetected: u64,
    steps: u64,
    fg: u64,
    list: u64,
}

impl Accumulator {
    fn add(&mut self, o: &FrameOutcome) {
        self.frames += 1;
        self.bit_errors += o.bit_errors;
        self.frame_errors += o.frame_error as u64;
        self.undetected += o.undetected_error as u64;
        self.steps += o.sequential_steps;
        self.fg += o.fg_ops;
        self.list += o.used_list_size as u64;
    }

    fn row(&self, snr_db: f64, payload_bits: usize) -> SnrRow {
        let frames = self.frames.max(1) as f64;
        let fer = self.frame_errors as f64 / frames;
        let fer_ci95 = if self.frame_errors == 0 {
            3.0 / frames
        } else {
            1.96 * (fer * (1.0 - fer) / frames).sqrt()
        };
        SnrRow {
            snr_db,
            frames: self.frames,
            bit_errors: self.bit_errors,
            frame_errors: self.frame_errors,
            ber: self.bit_errors as f64 / (frames * payload_bits.max(1) as f64),
            fer,
            fer_ci95,
            seq_steps: self.steps as f64 / frames,
            fg_ops: self.fg as f64 / frames,
            mean_list_size: self.list as f64 / frames,
        }
    }
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        Ok(job())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        Ok(pool.install(job))
    }
}

fn stop_reached(errors: u64, max_errors: u64) -> bool {
    max_errors > 0 && errors >= max_errors
}

/// Runs the Monte-Carlo sweep over every configured SNR point.
///
/// `workers` caps the worker thread count; 0 uses the default pool.
/// Results are independent of `workers`.
pub fn run_sweep(config: &SimConfig, workers: usize) -> Result<SimReport> {
    config.validate()?;
    with_pool(workers, || {
        let mut rows = Vec::with_capacity(config.snr_points_db.len());
        for &snr_db in &config.snr_points_db {
            let mut acc = Accumulator::default();
            let mut next_frame = 0u64;
            while next_frame < config.max_frames
                && !stop_reached(acc.frame_errors, config.max_errors)
            {
                let count = FRAME_BATCH.min(config.max_frames - next_frame);
                let outcomes: Result<Vec<FrameOutcome>> = (next_frame..next_frame + count)
                    .into_par_iter()
                    .map(|i| run_frame(config, snr_db, i))
                    .collect();
                for o in outcomes? {
                    acc.add(&o);
                }
                next_frame += count;
            }
            rows.push(acc.row(snr_db, config.spec.payload_len()));
        }
        Ok(SimReport { rows })
    })?
}

/// Paired z-statistic for a frame-error discordance count: `n01`
/// frames failed only under the baseline, `n10` only under the other
/// decoder. Zero when there is no discordance.
pub fn paired_z(n01: u64, n10: u64) -> f64 {
    let total = n01 + n10;
    if total == 0 {
        0.0
    } else {
        (n01 as f64 - n10 as f64) / (total as f64).sqrt()
    }
}

/// Absolute paired-z threshold flagged as a parity failure.
pub const PARITY_Z_LIMIT: f64 = 3.0;

/// One decoder's aggregate at one SNR point of a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityRow {
    pub snr_db: f64,
    pub decoder: String,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    /// Paired z against the first (baseline) decoder; 0 for the baseline.
    pub z: f64,
    pub parity_fail: bool,
}

/// Paired frame-error comparison of several decoders on one code.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityReport {
    pub rows: Vec<ParityRow>,
}

pub const PARITY_CSV_HEADER: &str =
    "snr_db,decoder,frames,bit_errors,frame_errors,ber,fer,z,parity_fail";

impl ParityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(PARITY_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.snr_db,
                r.decoder,
                r.frames,
                r.bit_errors,
                r.frame_errors,
                r.ber,
                r.fer,
                r.z,
                r.parity_fail
            ));
        }
        out
    }

    /// True when any decoder at any point exceeds the z threshold.
    pub fn any_parity_failure(&self) -> bool {
        self.rows.iter().any(|r| r.parity_fail)
    }
}

/// Runs every configured decoder over identical channel realizations
/// and scores frame-error parity against the first configuration.
///
/// All configurations must share the spec, SNR points, seed, stopping
/// rules and SNR convention; only the decoder may differ. A point
/// stops early once every decoder has hit `max_errors` frame errors.
pub fn compare_decoders(configs: &[SimConfig], workers: usize) -> Result<ParityReport> {
    let base = configs
        .first()
        .ok_or_else(|| Error::InvalidParameter("no configurations given".into()))?;
    base.validate()?;
    for c in &configs[1..] {
        let mut shared = c.clone();
        shared.decoder = base.decoder.clone();
        if shared != *base {
            return Err(Error::InvalidParameter(
                "compared configurations must differ only in the decoder".into(),
            ));
        }
    }
    let decoders: Vec<DecoderConfig> = configs.iter().map(|c| c.decoder.clone()).collect();

    with_pool(workers, || {
        let mut rows = Vec::new();
        for &snr_db in &base.snr_points_db {
            let mut accs: Vec<Accumulator> = vec![Accumulator::default(); decoders.len()];
            // Discordant counts against the baseline decoder.
            let mut n01 = vec![0u64; decoders.len()];
            let mut n10 = vec![0u64; decoders.len()];
            let mut next_frame = 0u64;
            loop {
                let all_stopped = accs
                    .iter()
                    .all(|a| stop_reached(a.frame_errors, base.max_errors));
                if next_frame >= base.max_frames || all_stopped {
                    break;
                }
                let count = FRAME_BATCH.min(base.max_frames - next_frame);
                let batch: Result<Vec<Vec<FrameOutcome>>> = (next_frame..next_frame + count)
                    .into_par_iter()
                    .map(|i| {
                        let (payload, llrs) = simulate_channel_frame(base, snr_db, i)?;
                        decoders
                            .iter()
                            .map(|d| {
                                decode_with(d, &base.spec, &llrs)
                                    .map(|dec| score_frame(&payload, &dec))
                            })
                            .collect()
                    })
                    .collect();
                for outcomes in batch? {
                    let base_err = outcomes[0].frame_error;
                    for (d, o) in outcomes.iter().enumerate() {
                        accs[d].add(o);
                        if base_err && !o.frame_error {
                            n01[d] += 1;
                        } else if !base_err && o.frame_error {
                            n10[d] += 1;
                        }
                    }
                }
                next_frame += count;
            }
            for (d, acc) in accs.iter().enumerate() {
                let row = acc.row(snr_db, base.spec.payload_len());
                let z = if d == 0 { 0.0 } else { paired_z(n01[d], n10[d]) };
                rows.push(ParityRow {
                    snr_db,
                    decoder: decoders[d].label(),
                    frames: row.frames,
                    bit_errors: row.bit_errors,
                    frame_errors: row.frame_errors,
                    ber: row.ber,
                    fer: row.fer,
                    z,
                    parity_fail: z.abs() > PARITY_Z_LIMIT,
                });
            }
        }
        Ok(ParityReport { rows })
    })?
}
