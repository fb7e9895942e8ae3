//! PAM4 alphabet and the Gray bit mapping.

use super::{BitStream, LinecodeError};

/// One PAM4 amplitude level. The discriminant is the normalized level.
#[repr(i8)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pam4Symbol {
    NegThree = -3,
    NegOne = -1,
    PosOne = 1,
    PosThree = 3,
}

/// Ordered sequence of PAM4 symbols.
pub type SymbolStream = Vec<Pam4Symbol>;

impl Pam4Symbol {
    pub const ALPHABET: [Pam4Symbol; 4] =
        [Pam4Symbol::NegThree, Pam4Symbol::NegOne, Pam4Symbol::PosOne, Pam4Symbol::PosThree];

    /// Normalized amplitude in {-3, -1, +1, +3}.
    pub fn level(self) -> f64 {
        self as i8 as f64
    }

    /// Exact conversion from a level value; anything off-alphabet is rejected.
    pub fn from_level(level: f64) -> Result<Self, LinecodeError> {
        match level {
            l if l == -3.0 => Ok(Pam4Symbol::NegThree),
            l if l == -1.0 => Ok(Pam4Symbol::NegOne),
            l if l == 1.0 => Ok(Pam4Symbol::PosOne),
            l if l == 3.0 => Ok(Pam4Symbol::PosThree),
            other => Err(LinecodeError::AlphabetError(other)),
        }
    }

    pub fn negated(self) -> Self {
        match self {
            Pam4Symbol::NegThree => Pam4Symbol::PosThree,
            Pam4Symbol::NegOne => Pam4Symbol::PosOne,
            Pam4Symbol::PosOne => Pam4Symbol::NegOne,
            Pam4Symbol::PosThree => Pam4Symbol::NegThree,
        }
    }

    /// Nearest-level decision with thresholds at -2, 0, +2.
    ///
    /// Ties (a value exactly on a threshold) round toward the lower-magnitude
    /// level, with 0.0 mapping to -1. The input must be finite; callers on
    /// noisy paths check that before slicing.
    pub fn slice_soft(soft: f64) -> Self {
        debug_assert!(soft.is_finite());
        if soft < -2.0 {
            Pam4Symbol::NegThree
        } else if soft <= 0.0 {
            Pam4Symbol::NegOne
        } else if soft <= 2.0 {
            Pam4Symbol::PosOne
        } else {
            Pam4Symbol::PosThree
        }
    }

    /// Gray-coded bit pair (msb, lsb) for this level.
    pub fn to_gray_bits(self) -> (u8, u8) {
        match self {
            Pam4Symbol::NegThree => (0, 0),
            Pam4Symbol::NegOne => (0, 1),
            Pam4Symbol::PosOne => (1, 1),
            Pam4Symbol::PosThree => (1, 0),
        }
    }

    /// Inverse of [`Pam4Symbol::to_gray_bits`].
    pub fn from_gray_bits(msb: u8, lsb: u8) -> Self {
        match (msb & 1, lsb & 1) {
            (0, 0) => Pam4Symbol::NegThree,
            (0, 1) => Pam4Symbol::NegOne,
            (1, 1) => Pam4Symbol::PosOne,
            _ => Pam4Symbol::PosThree,
        }
    }
}

/// Maps consecutive bit pairs (msb, lsb) onto PAM4 levels with the Gray code
/// 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
///
/// Gray coding keeps adjacent levels one bit apart, so the dominant
/// adjacent-level slicer errors cost a single bit each.
pub fn pam4_map(bits: &BitStream) -> Result<SymbolStream, LinecodeError> {
    if bits.len() % 2 != 0 {
        return Err(LinecodeError::LengthNotMultiple { len: bits.len(), multiple: 2 });
    }
    Ok(bits
        .as_slice()
        .chunks_exact(2)
        .map(|p| Pam4Symbol::from_gray_bits(p[0], p[1]))
        .collect())
}

/// Exact inverse of [`pam4_map`].
pub fn pam4_demap(symbols: &[Pam4Symbol]) -> BitStream {
    let mut bits = BitStream::with_capacity(symbols.len() * 2);
    for &s in symbols {
        let (msb, lsb) = s.to_gray_bits();
        bits.push(msb);
        bits.push(lsb);
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_matches_gray_table() {
        let bits = BitStream::from_bits(vec![0, 0, 0, 1, 1, 1, 1, 0]).unwrap();
        let syms = pam4_map(&bits).unwrap();
        assert_eq!(
            syms,
            vec![Pam4Symbol::NegThree, Pam4Symbol::NegOne, Pam4Symbol::PosOne, Pam4Symbol::PosThree]
        );
    }

    #[test]
    fn empty_maps_to_empty() {
        let bits = BitStream::default();
        assert!(pam4_map(&bits).unwrap().is_empty());
    }

    #[test]
    fn odd_length_rejected() {
        let bits = BitStream::from_bits(vec![0, 0, 0]).unwrap();
        assert!(matches!(pam4_map(&bits), Err(LinecodeError::LengthNotMultiple { len: 3, .. })));
    }

    #[test]
    fn demap_inverts_map() {
        let bits = BitStream::from_bits(vec![0, 0, 0, 1, 1, 1, 1, 0]).unwrap();
        let syms = pam4_map(&bits).unwrap();
        assert_eq!(pam4_demap(&syms), bits);
        assert_eq!(pam4_demap(&[Pam4Symbol::PosOne]).as_slice(), &[1, 1]);
    }

    #[test]
    fn off_alphabet_level_rejected() {
        assert_eq!(Pam4Symbol::from_level(2.0).unwrap_err(), LinecodeError::AlphabetError(2.0));
        assert_eq!(Pam4Symbol::from_level(3.0).unwrap(), Pam4Symbol::PosThree);
    }

    #[test]
    fn slicer_thresholds_and_ties() {
        assert_eq!(Pam4Symbol::slice_soft(2.7), Pam4Symbol::PosThree);
        assert_eq!(Pam4Symbol::slice_soft(-0.4), Pam4Symbol::NegOne);
        assert_eq!(Pam4Symbol::slice_soft(0.0), Pam4Symbol::NegOne);
        assert_eq!(Pam4Symbol::slice_soft(2.0), Pam4Symbol::PosOne);
        assert_eq!(Pam4Symbol::slice_soft(-2.0), Pam4Symbol::NegOne);
        assert_eq!(Pam4Symbol::slice_soft(-2.0000001), Pam4Symbol::NegThree);
    }

    #[test]
    fn slicer_is_monotone() {
        let mut prev = Pam4Symbol::slice_soft(-5.0);
        let mut x = -5.0;
        while x <= 5.0 {
            let cur = Pam4Symbol::slice_soft(x);
            assert!(cur >= prev);
            prev = cur;
            x += 0.01;
        }
    }
}
