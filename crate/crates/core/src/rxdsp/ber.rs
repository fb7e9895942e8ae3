//! Bit and symbol error counting against the known payload.

use super::RxDspError;
use crate::linecode::BitStream;

/// Pre-FEC threshold of a 7%-overhead hard-decision FEC.
pub const FEC_THRESHOLD_BER: f64 = 3.8e-3;

/// Exact error counts for one comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub bit_errors: u64,
    pub bits_compared: u64,
    pub ber: f64,
    /// Errors over consecutive bit pairs (payload-domain PAM4 symbols).
    pub symbol_errors: u64,
    pub symbols_compared: u64,
    pub ser: f64,
    /// Whether the measured BER clears the 7% FEC threshold.
    pub fec_pass: bool,
}

impl ErrorReport {
    pub fn empty() -> Self {
        ErrorReport {
            bit_errors: 0,
            bits_compared: 0,
            ber: 0.0,
            symbol_errors: 0,
            symbols_compared: 0,
            ser: 0.0,
            fec_pass: true,
        }
    }

    /// Rebuild the derived rates after accumulating counts.
    pub fn from_counts(
        bit_errors: u64,
        bits_compared: u64,
        symbol_errors: u64,
        symbols_compared: u64,
    ) -> Self {
        let ber = if bits_compared > 0 { bit_errors as f64 / bits_compared as f64 } else { 0.0 };
        let ser =
            if symbols_compared > 0 { symbol_errors as f64 / symbols_compared as f64 } else { 0.0 };
        ErrorReport {
            bit_errors,
            bits_compared,
            ber,
            symbol_errors,
            symbols_compared,
            ser,
            fec_pass: ber <= FEC_THRESHOLD_BER,
        }
    }
}

/// Compares two equal-length bit streams exactly.
pub fn count_errors(tx: &BitStream, rx: &BitStream) -> Result<ErrorReport, RxDspError> {
    if tx.len() != rx.len() {
        return Err(RxDspError::LengthMismatch { tx: tx.len(), rx: rx.len() });
    }
    let mut bit_errors = 0u64;
    let mut symbol_errors = 0u64;
    let a = tx.as_slice();
    let b = rx.as_slice();
    let mut i = 0;
    while i < a.len() {
        let hi = (i + 2).min(a.len());
        let mut any = false;
        for k in i..hi {
            if a[k] != b[k] {
                bit_errors += 1;
                any = true;
            }
        }
        if any {
            symbol_errors += 1;
        }
        i = hi;
    }
    Ok(ErrorReport::from_counts(
        bit_errors,
        a.len() as u64,
        symbol_errors,
        (a.len() as u64).div_ceil(2),
    ))
}
