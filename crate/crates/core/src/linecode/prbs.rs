//! Maximal-length pseudo-random binary sequences (Fibonacci LFSR).

use super::{BitStream, LinecodeError};

/// Feedback taps of a primitive polynomial per register length, from the
/// standard maximal-length LFSR tables (Xilinx XAPP052). Tap positions are
/// 1-based; order n uses `TAPS[n - 7]`.
const TAPS: [&[u32]; 25] = [
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 6, 4, 1],
    &[13, 4, 3, 1],
    &[14, 5, 3, 1],
    &[15, 14],
    &[16, 15, 13, 4],
    &[17, 14],
    &[18, 11],
    &[19, 6, 2, 1],
    &[20, 17],
    &[21, 19],
    &[22, 21],
    &[23, 18],
    &[24, 23, 22, 17],
    &[25, 22],
    &[26, 6, 2, 1],
    &[27, 5, 2, 1],
    &[28, 25],
    &[29, 27],
    &[30, 6, 4, 1],
    &[31, 28],
];

/// Generates `length` bits of the maximal-length sequence of the given
/// register order, seeded with any nonzero initial state.
///
/// The sequence has period 2^order - 1 and is identical for identical
/// (order, seed) pairs. The default payload source elsewhere in the crate is
/// order 16, matching a 2^16-bit PRBS.
pub fn prbs_generate(order: u32, seed: u64, length: usize) -> Result<BitStream, LinecodeError> {
    if !(7..=31).contains(&order) {
        return Err(LinecodeError::UnsupportedOrder(order));
    }
    if length == 0 {
        return Err(LinecodeError::EmptyLength);
    }
    let mask = (1u64 << order) - 1;
    let mut state = seed & mask;
    if state == 0 {
        return Err(LinecodeError::InvalidSeed);
    }

    let taps = TAPS[(order - 7) as usize];
    let mut out = BitStream::with_capacity(length);
    for _ in 0..length {
        // Output the oldest stage, feed the XOR of the tapped stages back in.
        let fb = taps.iter().fold(0u64, |acc, &t| acc ^ (state >> (t - 1))) & 1;
        out.push((state >> (order - 1)) as u8 & 1);
        state = ((state << 1) | fb) & mask;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_seed_rejected() {
        assert_eq!(prbs_generate(16, 0, 16).unwrap_err(), LinecodeError::InvalidSeed);
    }

    #[test]
    fn unsupported_order_rejected() {
        assert_eq!(prbs_generate(6, 1, 16).unwrap_err(), LinecodeError::UnsupportedOrder(6));
        assert_eq!(prbs_generate(32, 1, 16).unwrap_err(), LinecodeError::UnsupportedOrder(32));
    }

    #[test]
    fn order16_has_full_period() {
        let period = (1usize << 16) - 1;
        let bits = prbs_generate(16, 0xACE1, 2 * period).unwrap();
        for i in 0..period {
            assert_eq!(bits[i], bits[i + period], "mismatch at {i}");
        }
        // No shorter period at a few candidate divisors of 2^16 - 1.
        for sub in [3, 5, 17, 257, 4369, 13107, 21845] {
            assert!((0..period - sub).any(|i| bits[i] != bits[i + sub]), "period divides {sub}");
        }
    }

    #[test]
    fn order7_is_balanced() {
        // One period of an order-n m-sequence holds 2^(n-1) ones.
        let bits = prbs_generate(7, 1, 127).unwrap();
        let ones: u32 = bits.iter().map(u32::from).sum();
        assert_eq!(ones, 64);
    }

    #[test]
    fn deterministic_for_same_seed() {
        let a = prbs_generate(16, 42, 1000).unwrap();
        let b = prbs_generate(16, 42, 1000).unwrap();
        let c = prbs_generate(16, 43, 1000).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn all_supported_orders_balanced_over_period() {
        // Balance over one full period is a quick primitivity smoke test;
        // keep the larger orders out to bound test time.
        for order in 7..=20u32 {
            let period = (1usize << order) - 1;
            let bits = prbs_generate(order, 1, period).unwrap();
            let ones: usize = bits.iter().map(usize::from).sum();
            assert_eq!(ones, 1 << (order - 1), "order {order} unbalanced");
        }
    }
}
