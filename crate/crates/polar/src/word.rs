//! Bit and LLR vector types shared by the codec modules.

use crate::{Error, Result, LLR_SAT};

/// Fixed-length bit sequence over GF(2).
///
/// Every element is 0 or 1; the length is fixed at construction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitWord {
    bits: Vec<u8>,
}

impl BitWord {
    /// All-zero word of the given length.
    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![0u8; len],
        }
    }

    /// Builds a word from raw bits, rejecting any value other than 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        for (index, &value) in bits.iter().enumerate() {
            if value > 1 {
                return Err(Error::NotABit { index, value });
            }
        }
        Ok(Self { bits })
    }

    /// Word built from a predicate over bit positions.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> u8) -> Self {
        Self {
            bits: (0..len).map(|i| f(i) & 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, index: usize) -> u8 {
        self.bits[index]
    }

    pub fn set(&mut self, index: usize, value: u8) {
        debug_assert!(value <= 1);
        self.bits[index] = value & 1;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u8> {
        self.bits.iter()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Position-wise XOR of two equal-length words.
    pub fn xor(&self, other: &BitWord) -> Result<BitWord> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(BitWord {
            bits: self
                .bits
                .iter()
                .zip(other.bits.iter())
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// Concatenation of `self` followed by `other`.
    pub fn concat(&self, other: &BitWord) -> BitWord {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitWord { bits }
    }

    /// Sub-word `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> BitWord {
        BitWord {
            bits: self.bits[start..end].to_vec(),
        }
    }

    /// ASCII rendering, one `0`/`1` character per bit.
    pub fn to_string01(&self) -> String {
        self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }

    /// Parses an ASCII `0`/`1` string (surrounding whitespace ignored).
    pub fn parse01(text: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(text.len());
        for c in text.trim().chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                other => {
                    return Err(Error::Parse(format!(
                        "unexpected character {other:?} in bit string"
                    )))
                }
            }
        }
        Ok(Self { bits })
    }
}

impl std::ops::Index<usize> for BitWord {
    type Output = u8;

    fn index(&self, index: usize) -> &u8 {
        &self.bits[index]
    }
}

impl FromIterator<u8> for BitWord {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().map(|b| b & 1).collect(),
        }
    }
}

/// Vector of log-likelihood ratios.
///
/// Values are clamped to `±`[`LLR_SAT`] on construction so stored LLRs
/// are always finite.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LlrWord {
    values: Vec<f64>,
}

impl LlrWord {
    pub fn new(values: Vec<f64>) -> Self {
        let values = values
            .into_iter()
            .map(|v| {
                debug_assert!(!v.is_nan(), "LLR must not be NaN");
                v.clamp(-LLR_SAT, LLR_SAT)
            })
            .collect();
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

impl std::ops::Index<usize> for LlrWord {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.values[index]
    }
}
