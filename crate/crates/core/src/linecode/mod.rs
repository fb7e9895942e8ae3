//! Bit sources, PAM4 symbol mapping and the two DC-balancing line codes.
//!
//! Two encodings are provided on top of plain PAM4:
//!
//! * 8B/10B — each payload byte becomes a 10-bit DC-balanced group via the
//!   standard 5b/6b + 3b/4b sub-block tables with running-disparity
//!   selection. Two independently coded bit lanes drive the PAM4 MSB and
//!   LSB, costing 20% of the net rate.
//! * Manchester-over-PAM4 — each PAM4 symbol `s` is transmitted as the
//!   half-symbol pair `(s, -s)`, guaranteeing a zero mean per symbol at the
//!   cost of half the net rate.
//!
//! All operations are pure: encoder state (the running disparity) is passed
//! and returned explicitly.

mod code8b10b;
mod manchester;
mod pam4;
mod prbs;

pub use code8b10b::{
    decode_8b10b, decode_8b10b_pam4, encode_8b10b, encode_8b10b_pam4, encode_byte_8b10b,
};
pub use manchester::{decode_manchester_pam4, encode_manchester_pam4, ManchesterDecodeMode};
pub use pam4::{pam4_demap, pam4_map, Pam4Symbol, SymbolStream};
pub use prbs::prbs_generate;

use thiserror::Error;

/// Errors from bit-level and symbol-level codecs.
#[derive(Debug, Error, PartialEq)]
pub enum LinecodeError {
    #[error("bit value {value} at index {index} is not 0 or 1")]
    InvalidBit { index: usize, value: u8 },
    #[error("PRBS seed must be nonzero")]
    InvalidSeed,
    #[error("no stored primitive polynomial for PRBS order {0} (supported: 7..=31)")]
    UnsupportedOrder(u32),
    #[error("PRBS length must be at least 1")]
    EmptyLength,
    #[error("input length {len} is not a multiple of {multiple}")]
    LengthNotMultiple { len: usize, multiple: usize },
    #[error("value {0} is not a PAM4 level (expected -3, -1, +1 or +3)")]
    AlphabetError(f64),
}

/// A finite sequence of bits, each 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitStream {
    bits: Vec<u8>,
}

impl BitStream {
    /// Validates that every element is 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, LinecodeError> {
        for (index, &value) in bits.iter().enumerate() {
            if value > 1 {
                return Err(LinecodeError::InvalidBit { index, value });
            }
        }
        Ok(Self { bits })
    }

    pub fn with_capacity(n: usize) -> Self {
        Self { bits: Vec::with_capacity(n) }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits.push(bit);
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, u8>> {
        self.bits.iter().copied()
    }

    /// Packs bits into bytes, most significant bit first.
    pub fn to_bytes_msb_first(&self) -> Result<Vec<u8>, LinecodeError> {
        if self.len() % 8 != 0 {
            return Err(LinecodeError::LengthNotMultiple { len: self.len(), multiple: 8 });
        }
        Ok(self
            .bits
            .chunks_exact(8)
            .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b))
            .collect())
    }

    /// Unpacks bytes into bits, most significant bit first.
    pub fn from_bytes_msb_first(bytes: &[u8]) -> Self {
        let mut bits = Vec::with_capacity(bytes.len() * 8);
        for &byte in bytes {
            for shift in (0..8).rev() {
                bits.push((byte >> shift) & 1);
            }
        }
        Self { bits }
    }
}

impl std::ops::Index<usize> for BitStream {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.bits[i]
    }
}

impl FromIterator<u8> for BitStream {
    /// Collects bits; values are masked in debug builds only via `push`.
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut s = BitStream::default();
        for b in iter {
            s.push(b);
        }
        s
    }
}

/// Running disparity of an 8B/10B stream: the sign of the cumulative
/// ones-minus-zeros imbalance. Always -1 or +1 at 10-bit group boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disparity {
    Minus,
    Plus,
}

impl Disparity {
    pub fn value(self) -> i8 {
        match self {
            Disparity::Minus => -1,
            Disparity::Plus => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Disparity::Minus => Disparity::Plus,
            Disparity::Plus => Disparity::Minus,
        }
    }
}

/// Decoder diagnostics: group indices that failed validation.
///
/// Indices are strictly increasing. An invalid group decodes to the 0x00
/// placeholder byte rather than being dropped, so error accounting stays
/// aligned with the payload.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecodeFlags {
    pub invalid_code_positions: Vec<usize>,
    pub disparity_error_positions: Vec<usize>,
}

impl DecodeFlags {
    pub fn is_clean(&self) -> bool {
        self.invalid_code_positions.is_empty() && self.disparity_error_positions.is_empty()
    }

    pub fn merge_offset(&mut self, other: &DecodeFlags, offset: usize) {
        self.invalid_code_positions
            .extend(other.invalid_code_positions.iter().map(|p| p + offset));
        self.disparity_error_positions
            .extend(other.disparity_error_positions.iter().map(|p| p + offset));
    }
}
