//! Receiver DSP: frame synchronization, decision-directed LMS equalization,
//! PAM4 slicing, per-scheme decoding and error counting.

mod ber;
mod decode;
mod equalizer;
mod sync;

pub use ber::{count_errors, ErrorReport, FEC_THRESHOLD_BER};
pub use decode::{decode_chain, slice_pam4, Scheme};
pub use equalizer::{dd_lms_equalize, EqualizeResult, EqualizerState};
pub use sync::{frame_sync, SyncResult};

use crate::linecode::{pam4_map, prbs_generate, Pam4Symbol};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RxDspError {
    #[error("received stream of {got} symbols is too short (need {need})")]
    SignalTooShort { got: usize, need: usize },
    #[error("step size {mu} is at or above the LMS stability bound {bound}")]
    MuUnstable { mu: f64, bound: f64 },
    #[error("equalizer diverged: non-finite output at symbol {symbol_index}")]
    Divergence { symbol_index: usize },
    #[error("non-finite soft value at index {0}")]
    NonFiniteSoft(usize),
    #[error("stream length {len} incompatible with {scheme:?} framing (multiple of {multiple})")]
    FramingError { scheme: Scheme, len: usize, multiple: usize },
    #[error("bit streams differ in length: {tx} vs {rx}")]
    LengthMismatch { tx: usize, rx: usize },
    #[error(transparent)]
    Linecode(#[from] crate::linecode::LinecodeError),
}

/// The 32-symbol training sequence used for frame synchronization and the
/// initial training-directed LMS phase. Fixed across the crate so both ends
/// of a simulated link agree.
pub fn training_sequence() -> &'static [Pam4Symbol; 32] {
    static TRAINING: OnceLock<[Pam4Symbol; 32]> = OnceLock::new();
    TRAINING.get_or_init(|| {
        let bits = prbs_generate(7, 0x5B, 64).expect("valid PRBS parameters");
        pam4_map(&bits).expect("even length").try_into().expect("32 symbols")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn training_sequence_is_stable_and_mixed() {
        let t = training_sequence();
        assert_eq!(t.len(), 32);
        // Uses all four levels and is not trivially periodic.
        for level in Pam4Symbol::ALPHABET {
            assert!(t.contains(&level), "missing {level:?}");
        }
        assert_ne!(&t[0..16], &t[16..32]);
    }
}
