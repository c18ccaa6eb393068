//! Code construction: frozen-set selection, CRC configuration, and the
//! [`CodeSpec`] describing one concrete polar code.
//!
//! Frozen positions are chosen by the Bhattacharyya-parameter
//! recursion `z -> {2z - z^2, z^2}` seeded with
//! `z0 = exp(-10^(design_snr_db/10))`; the `N - K` indices with the
//! largest parameters are frozen. Seeding does not depend on `K`, so
//! information sets nest across rates at a fixed design SNR.

use serde::{Deserialize, Serialize};

use crate::kernel::polar_encode;
use crate::word::BitWord;
use crate::{Error, Result};

/// Default construction SNR (Eb/N0, dB).
pub const DEFAULT_DESIGN_SNR_DB: f64 = 2.0;

/// Cyclic-redundancy-check configuration.
///
/// The register is `width` bits, processed MSB-first over the input
/// bit stream; `reflect` reverses the input bit order and the final
/// register, `final_xor` is applied to the register after processing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrcConfig {
    width: usize,
    poly: u64,
    init: u64,
    final_xor: u64,
    reflect: bool,
}

impl CrcConfig {
    pub fn new(width: usize, poly: u64, init: u64, final_xor: u64, reflect: bool) -> Result<Self> {
        if width == 0 || width > 64 {
            return Err(Error::InvalidParameter(format!(
                "CRC width {width} out of range 1..=64"
            )));
        }
        let mask = Self::mask_for(width);
        Ok(Self {
            width,
            poly: poly & mask,
            init: init & mask,
            final_xor: final_xor & mask,
            reflect,
        })
    }

    /// CRC-16-CCITT: polynomial `x^16 + x^12 + x^5 + 1`, zero initial
    /// value, no reflection, no final XOR.
    pub fn crc16_ccitt() -> Self {
        Self {
            width: 16,
            poly: 0x1021,
            init: 0,
            final_xor: 0,
            reflect: false,
        }
    }

    fn mask_for(width: usize) -> u64 {
        if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    pub fn init(&self) -> u64 {
        self.init
    }

    /// CRC register value over a bit sequence.
    pub fn checksum(&self, bits: &[u8]) -> u64 {
        let mask = Self::mask_for(self.width);
        let top = 1u64 << (self.width - 1);
        let mut reg = self.init;
        let mut process = |bit: u64| {
            let msb = (reg & top) != 0;
            reg = (reg << 1) & mask;
            if msb != (bit == 1) {
                reg ^= self.poly;
            }
        };
        if self.reflect {
            for &b in bits.iter().rev() {
                process(b as u64);
            }
        } else {
            for &b in bits {
                process(b as u64);
            }
        }
        if self.reflect {
            reg = reverse_low_bits(reg, self.width);
        }
        (reg ^ self.final_xor) & mask
    }

    /// Checksum rendered MSB-first as a bit word of length `width`.
    fn checksum_bits(&self, bits: &[u8]) -> BitWord {
        let value = self.checksum(bits);
        BitWord::from_fn(self.width, |i| ((value >> (self.width - 1 - i)) & 1) as u8)
    }
}

fn reverse_low_bits(value: u64, width: usize) -> u64 {
    let mut out = 0u64;
    for i in 0..width {
        out |= ((value >> i) & 1) << (width - 1 - i);
    }
    out
}

/// Appends the CRC field to `payload`.
pub fn attach_crc(payload: &BitWord, crc: &CrcConfig) -> BitWord {
    payload.concat(&crc.checksum_bits(payload.as_slice()))
}

/// True iff `info_bits` is `payload || crc(payload)`.
pub fn check_crc(info_bits: &BitWord, crc: &CrcConfig) -> bool {
    if info_bits.len() < crc.width {
        return false;
    }
    let split = info_bits.len() - crc.width;
    let expected = crc.checksum_bits(&info_bits.as_slice()[..split]);
    info_bits.as_slice()[split..] == *expected.as_slice()
}

/// Bhattacharyya parameters of the `N` synthesized bit channels, in
/// `u`-index order, designed at `design_snr_db` (Es/N0).
pub fn bhattacharyya_parameters(code_len: usize, design_snr_db: f64) -> Vec<f64> {
    debug_assert!(code_len.is_power_of_two());
    let es_n0 = 10f64.powf(design_snr_db / 10.0);
    let z0 = (-es_n0).exp();
    let mut z = vec![z0];
    while z.len() < code_len {
        let mut next = Vec::with_capacity(z.len() * 2);
        for &zi in &z {
            next.push(2.0 * zi - zi * zi);
            next.push(zi * zi);
        }
        z = next;
    }
    z
}

/// Frozen mask (1 = frozen) for an `(N, K)` code: the `N - K` indices
/// with the largest Bhattacharyya parameters, ties frozen at the lower
/// index first.
pub fn construct_frozen_set(code_len: usize, k: usize, design_snr_db: f64) -> Result<Vec<u8>> {
    if !code_len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len: code_len });
    }
    if k == 0 || k > code_len {
        return Err(Error::InvalidParameter(format!(
            "K={k} out of range 1..={code_len}"
        )));
    }
    let z = bhattacharyya_parameters(code_len, design_snr_db);
    let mut order: Vec<usize> = (0..code_len).collect();
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut mask = vec![0u8; code_len];
    for &i in order.iter().take(code_len - k) {
        mask[i] = 1;
    }
    Ok(mask)
}

/// Static description of one polar code: block length, frozen mask,
/// optional CRC, and the SNR it was designed at.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    n: usize,
    k: usize,
    frozen_mask: Vec<u8>,
    info_positions: Vec<usize>,
    crc: Option<CrcConfig>,
    design_snr_db: f64,
}

impl CodeSpec {
    /// Assembles a spec with a constructed frozen set.
    ///
    /// `K` counts all information bits carried in `u`; with a CRC the
    /// payload occupies `K - crc.width` of them.
    pub fn build(n: usize, k: usize, crc: Option<CrcConfig>, design_snr_db: f64) -> Result<Self> {
        let code_len = 1usize
            .checked_shl(n as u32)
            .filter(|_| n <= 30)
            .ok_or(Error::SizeLimit { n, limit: 30 })?;
        let frozen_mask = construct_frozen_set(code_len, k, design_snr_db)?;
        Self::with_frozen_mask(n, frozen_mask, crc, design_snr_db)
    }

    /// Assembles a spec from an explicit frozen mask.
    pub fn with_frozen_mask(
        n: usize,
        frozen_mask: Vec<u8>,
        crc: Option<CrcConfig>,
        design_snr_db: f64,
    ) -> Result<Self> {
        let code_len = 1usize << n;
        if frozen_mask.len() != code_len {
            return Err(Error::LengthMismatch {
                expected: code_len,
                actual: frozen_mask.len(),
            });
        }
        for (index, &value) in frozen_mask.iter().enumerate() {
            if value > 1 {
                return Err(Error::NotABit { index, value });
            }
        }
        let info_positions: Vec<usize> = (0..code_len).filter(|&i| frozen_mask[i] == 0).collect();
        let k = info_positions.len();
        if let Some(crc) = &crc {
            if k < crc.width() {
                return Err(Error::InvalidParameter(format!(
                    "K={k} smaller than CRC width {}",
                    crc.width()
                )));
            }
        }
        Ok(Self {
            n,
            k,
            frozen_mask,
            info_positions,
            crc,
            design_snr_db,
        })
    }

    /// Transform order `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Block length `N = 2^n`.
    pub fn block_len(&self) -> usize {
        1 << self.n
    }

    /// Number of information bits carried in `u` (CRC included).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Payload length: `K` minus the CRC width, if any.
    pub fn payload_len(&self) -> usize {
        self.k - self.crc.as_ref().map_or(0, |c| c.width())
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.block_len() as f64
    }

    pub fn frozen_mask(&self) -> &[u8] {
        &self.frozen_mask
    }

    pub fn is_frozen(&self, u_index: usize) -> bool {
        self.frozen_mask[u_index] == 1
    }

    /// Information positions of `u`, in increasing index order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn crc(&self) -> Option<&CrcConfig> {
        self.crc.as_ref()
    }

    pub fn design_snr_db(&self) -> f64 {
        self.design_snr_db
    }

    /// Places information bits into a full `u` word (frozen bits zero).
    pub fn assemble_u(&self, info_bits: &BitWord) -> Result<BitWord> {
        if info_bits.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                actual: info_bits.len(),
            });
        }
        let mut u = BitWord::zeros(self.block_len());
        for (j, &pos) in self.info_positions.iter().enumerate() {
            u.set(pos, info_bits.bit(j));
        }
        Ok(u)
    }

    /// Extracts the information bits of a full `u` word.
    pub fn info_of_u(&self, u: &BitWord) -> BitWord {
        BitWord::from_fn(self.k, |j| u.bit(self.info_positions[j]))
    }

    /// Payload part of an information word (CRC field stripped).
    pub fn payload_of_info(&self, info_bits: &BitWord) -> BitWord {
        info_bits.slice(0, self.payload_len())
    }

    /// Appends the CRC (when configured) to a payload.
    pub fn info_from_payload(&self, payload: &BitWord) -> Result<BitWord> {
        if payload.len() != self.payload_len() {
            return Err(Error::LengthMismatch {
                expected: self.payload_len(),
                actual: payload.len(),
            });
        }
        Ok(match &self.crc {
            Some(crc) => attach_crc(payload, crc),
            None => payload.clone(),
        })
    }

    /// Full encode path: payload -> CRC attach -> `u` -> codeword.
    pub fn encode_payload(&self, payload: &BitWord) -> Result<BitWord> {
        let info = self.info_from_payload(payload)?;
        polar_encode(&self.assemble_u(&info)?)
    }

    /// CRC verdict for an information word; `None` when the spec has no CRC.
    pub fn info_passes_crc(&self, info_bits: &BitWord) -> Option<bool> {
        self.crc.as_ref().map(|crc| check_crc(info_bits, crc))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CodeSpecDoc::from(self)).expect("spec serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CodeSpecDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("spec JSON: {e}")))?;
        doc.try_into()
    }
}

/// Assembles a [`CodeSpec`] with a constructed frozen set.
pub fn build_code_spec(
    n: usize,
    k: usize,
    crc: Option<CrcConfig>,
    design_snr_db: f64,
) -> Result<CodeSpec> {
    CodeSpec::build(n, k, crc, design_snr_db)
}

impl Serialize for CodeSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CodeSpecDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CodeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let doc = CodeSpecDoc::deserialize(deserializer)?;
        CodeSpec::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// Wire format of a [`CodeSpec`]: the frozen mask is a hex string in
/// which bit 0 of the first digit is `u` index 0.
#[derive(Serialize, Deserialize)]
struct CodeSpecDoc {
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    design_snr_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    crc: Option<CrcDoc>,
    frozen_mask: String,
}

#[derive(Serialize, Deserialize)]
struct CrcDoc {
    width: usize,
    poly_hex: String,
    init_hex: String,
}

fn mask_to_hex(mask: &[u8]) -> String {
    let digits = mask.len().div_ceil(4);
    (0..digits)
        .map(|d| {
            let mut nibble = 0u32;
            for b in 0..4 {
                let i = 4 * d + b;
                if i < mask.len() && mask[i] == 1 {
                    nibble |= 1 << b;
                }
            }
            char::from_digit(nibble, 16).unwrap()
        })
        .collect()
}

fn mask_from_hex(text: &str, code_len: usize) -> Result<Vec<u8>> {
    let digits = code_len.div_ceil(4);
    if text.len() != digits {
        return Err(Error::Parse(format!(
            "frozen mask has {} hex digits, expected {digits}",
            text.len()
        )));
    }
    let mut mask = vec![0u8; code_len];
    for (d, c) in text.chars().enumerate() {
        let nibble = c
            .to_digit(16)
            .ok_or_else(|| Error::Parse(format!("bad hex digit {c:?} in frozen mask")))?;
        for b in 0..4 {
            let i = 4 * d + b;
            if (nibble >> b) & 1 == 1 {
                if i >= code_len {
                    return Err(Error::Parse("frozen mask sets bits beyond N".into()));
                }
                mask[i] = 1;
            }
        }
    }
    Ok(mask)
}

fn parse_hex(text: &str) -> Result<u64> {
    let digits = text.trim_start_matches("0x");
    u64::from_str_radix(digits, 16).map_err(|e| Error::Parse(format!("bad hex value {text:?}: {e}")))
}

impl From<&CodeSpec> for CodeSpecDoc {
    fn from(spec: &CodeSpec) -> Self {
        CodeSpecDoc {
            n: spec.n,
            k: spec.k,
            design_snr_db: spec.design_snr_db,
            crc: spec.crc.as_ref().map(|c| CrcDoc {
                width: c.width(),
                poly_hex: format!("{:04x}", c.poly()),
                init_hex: format!("{:04x}", c.init()),
            }),
            frozen_mask: mask_to_hex(&spec.frozen_mask),
        }
    }
}

impl TryFrom<CodeSpecDoc> for CodeSpec {
    type Error = Error;

    fn try_from(doc: CodeSpecDoc) -> Result<Self> {
        if doc.n > 30 {
            return Err(Error::SizeLimit {
                n: doc.n,
                limit: 30,
            });
        }
        let code_len = 1usize << doc.n;
        let mask = mask_from_hex(&doc.frozen_mask, code_len)?;
        let crc = match doc.crc {
            Some(c) => Some(CrcConfig::new(
                c.width,
                parse_hex(&c.poly_hex)?,
                parse_hex(&c.init_hex)?,
                0,
                false,
            )?),
            None => None,
        };
        let spec = CodeSpec::with_frozen_mask(doc.n, mask, crc, doc.design_snr_db)?;
        if spec.k() != doc.k {
            return Err(Error::Parse(format!(
                "frozen mask carries K={}, document says K={}",
                spec.k(),
                doc.k
            )));
        }
        Ok(spec)
    }
}
