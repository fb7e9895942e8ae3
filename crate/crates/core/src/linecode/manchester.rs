//! Manchester encoding over PAM4 symbols.
//!
//! Each symbol `s` becomes the half-symbol pair `(s, -s)`: low-to-high
//! transitions -3 to 3 and -1 to 1, high-to-low transitions 3 to -3 and
//! 1 to -1. Every pair sums to zero, so the encoded stream has no DC
//! content at all, at the cost of halving the net rate.

use super::{LinecodeError, Pam4Symbol, SymbolStream};

/// How soft half-symbol values are combined back into one decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ManchesterDecodeMode {
    /// For each pair (y1, y2), slice (y1 - y2) / 2. Uses both halves, so
    /// white noise is averaged down and any perturbation common to the pair
    /// (slow intensity drift) cancels.
    #[default]
    Difference,
    /// Slice y1 directly, discarding the second half.
    FirstHalf,
}

/// Replaces each symbol `s` with the ordered pair `(s, -s)`.
pub fn encode_manchester_pam4(symbols: &[Pam4Symbol]) -> SymbolStream {
    let mut out = Vec::with_capacity(symbols.len() * 2);
    for &s in symbols {
        out.push(s);
        out.push(s.negated());
    }
    out
}

/// Decodes soft (pre-slicing) half-symbol values back to PAM4 symbols.
pub fn decode_manchester_pam4(
    soft_halves: &[f64],
    mode: ManchesterDecodeMode,
) -> Result<SymbolStream, LinecodeError> {
    if soft_halves.len() % 2 != 0 {
        return Err(LinecodeError::LengthNotMultiple { len: soft_halves.len(), multiple: 2 });
    }
    Ok(soft_halves
        .chunks_exact(2)
        .map(|pair| match mode {
            ManchesterDecodeMode::Difference => Pam4Symbol::slice_soft((pair[0] - pair[1]) / 2.0),
            ManchesterDecodeMode::FirstHalf => Pam4Symbol::slice_soft(pair[0]),
        })
        .collect())
}
