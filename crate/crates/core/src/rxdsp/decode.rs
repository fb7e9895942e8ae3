//! Slicing and per-scheme decode dispatch.

use super::RxDspError;
use crate::linecode::{
    decode_8b10b_pam4, decode_manchester_pam4, pam4_demap, BitStream, DecodeFlags,
    ManchesterDecodeMode, Pam4Symbol,
};
use serde::Deserialize;

/// Line-coding scheme of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Scheme {
    #[serde(rename = "uncoded")]
    Uncoded,
    #[serde(rename = "8b10b")]
    EightBTenB,
    #[serde(rename = "manchester")]
    Manchester,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Uncoded, Scheme::EightBTenB, Scheme::Manchester];

    /// Payload bits carried per transmitted line symbol.
    pub fn bits_per_line_symbol(self) -> f64 {
        match self {
            Scheme::Uncoded => 2.0,
            Scheme::EightBTenB => 1.6,
            Scheme::Manchester => 1.0,
        }
    }

    /// Payload bit counts must be a multiple of this for clean framing.
    pub fn payload_frame_bits(self) -> usize {
        match self {
            Scheme::Uncoded => 2,
            Scheme::EightBTenB => 16,
            Scheme::Manchester => 2,
        }
    }

    /// Line-symbol framing multiple expected by the decoder.
    pub fn line_frame_symbols(self) -> usize {
        match self {
            Scheme::Uncoded => 1,
            Scheme::EightBTenB => 10,
            Scheme::Manchester => 2,
        }
    }

    pub fn line_symbols_for_payload_bits(self, bits: usize) -> usize {
        debug_assert_eq!(bits % self.payload_frame_bits(), 0);
        match self {
            Scheme::Uncoded => bits / 2,
            Scheme::EightBTenB => bits / 16 * 10,
            Scheme::Manchester => bits,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Uncoded => "uncoded",
            Scheme::EightBTenB => "8b10b",
            Scheme::Manchester => "manchester",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uncoded" => Ok(Scheme::Uncoded),
            "8b10b" => Ok(Scheme::EightBTenB),
            "manchester" => Ok(Scheme::Manchester),
            other => Err(format!("unknown scheme '{other}'")),
        }
    }
}

/// PAM4 decision with domain checking: thresholds at -2, 0, +2; ties round
/// toward the lower-magnitude level.
pub fn slice_pam4(soft: f64) -> Result<Pam4Symbol, RxDspError> {
    if !soft.is_finite() {
        return Err(RxDspError::NonFiniteSoft(0));
    }
    Ok(Pam4Symbol::slice_soft(soft))
}

fn slice_all(soft: &[f64]) -> Result<Vec<Pam4Symbol>, RxDspError> {
    soft.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v.is_finite() {
                Ok(Pam4Symbol::slice_soft(v))
            } else {
                Err(RxDspError::NonFiniteSoft(i))
            }
        })
        .collect()
}

/// Decodes equalized soft values back to payload bits for a scheme, with
/// the decoder ordering the schemes require: the 8B/10B decoder runs after
/// the PAM4 decision, while the Manchester decoder combines soft
/// half-symbols before the PAM4 decision.
pub fn decode_chain(soft: &[f64], scheme: Scheme) -> Result<(BitStream, DecodeFlags), RxDspError> {
    let frame = scheme.line_frame_symbols();
    if soft.len() % frame != 0 {
        return Err(RxDspError::FramingError { scheme, len: soft.len(), multiple: frame });
    }
    match scheme {
        Scheme::Uncoded => {
            let symbols = slice_all(soft)?;
            Ok((pam4_demap(&symbols), DecodeFlags::default()))
        }
        Scheme::EightBTenB => {
            let symbols = slice_all(soft)?;
            Ok(decode_8b10b_pam4(&symbols)?)
        }
        Scheme::Manchester => {
            if let Some(i) = soft.iter().position(|v| !v.is_finite()) {
                return Err(RxDspError::NonFiniteSoft(i));
            }
            let symbols = decode_manchester_pam4(soft, ManchesterDecodeMode::Difference)?;
            Ok((pam4_demap(&symbols), DecodeFlags::default()))
        }
    }
}
