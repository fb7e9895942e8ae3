//! 8B/10B codec: 5b/6b + 3b/4b sub-block tables with running-disparity
//! selection, and the two-lane combination onto PAM4.
//!
//! Only the 256 data characters are emitted on the transmit path; control
//! (K) characters are not part of the data pipeline. The decode tables are
//! derived from the encode tables at first use, so both directions share
//! one source of truth.

use std::sync::OnceLock;

use super::{BitStream, DecodeFlags, Disparity, LinecodeError, Pam4Symbol};

/// 5b/6b code table indexed by the low five input bits (EDCBA).
///
/// Stored as the RD- column with bit 5 = `a` (first transmitted). Entries
/// flagged `alt` send the bitwise complement when the running disparity is
/// positive; the unflagged entries are balanced codes with a single form.
const FIVE_SIX: [(u8, bool); 32] = [
    (0b100111, true),  // D.0
    (0b011101, true),  // D.1
    (0b101101, true),  // D.2
    (0b110001, false), // D.3
    (0b110101, true),  // D.4
    (0b101001, false), // D.5
    (0b011001, false), // D.6
    (0b111000, true),  // D.7 (balanced, complementary alternate)
    (0b111001, true),  // D.8
    (0b100101, false), // D.9
    (0b010101, false), // D.10
    (0b110100, false), // D.11
    (0b001101, false), // D.12
    (0b101100, false), // D.13
    (0b011100, false), // D.14
    (0b010111, true),  // D.15
    (0b011011, true),  // D.16
    (0b100011, false), // D.17
    (0b010011, false), // D.18
    (0b110010, false), // D.19
    (0b001011, false), // D.20
    (0b101010, false), // D.21
    (0b011010, false), // D.22
    (0b111010, true),  // D.23
    (0b110011, true),  // D.24
    (0b100110, false), // D.25
    (0b010110, false), // D.26
    (0b110110, true),  // D.27
    (0b001110, false), // D.28
    (0b101110, true),  // D.29
    (0b011110, true),  // D.30
    (0b101011, true),  // D.31
];

/// 3b/4b code table indexed by the high three input bits (HGF), primary
/// forms. Bit 3 = `f`. Same RD- column / complement convention as above.
const THREE_FOUR: [(u8, bool); 8] = [
    (0b1011, true),  // D.x.0
    (0b1001, false), // D.x.1
    (0b0101, false), // D.x.2
    (0b1100, true),  // D.x.3 (balanced, complementary alternate)
    (0b1101, true),  // D.x.4
    (0b1010, false), // D.x.5
    (0b0110, false), // D.x.6
    (0b1110, true),  // D.x.P7
];

/// Alternate 7 sub-block (D.x.A7), RD- form.
const A7: (u8, bool) = (0b0111, true);

fn sub_block_encode(code_rdm: u8, alt: bool, width: u32, rd: Disparity) -> (u8, Disparity) {
    let mask = (1u16 << width) as u8 - 1;
    let code = if alt && rd == Disparity::Plus { !code_rdm & mask } else { code_rdm };
    let disparity = 2 * code.count_ones() as i8 - width as i8;
    let rd_out = if disparity == 0 { rd } else { rd.flipped() };
    (code, rd_out)
}

/// Encodes one data byte to its 10-bit group (bit 9 = `a`, first
/// transmitted, down to bit 0 = `j`) and returns the updated disparity.
pub fn encode_byte_8b10b(byte: u8, rd: Disparity) -> (u16, Disparity) {
    let x = byte & 0x1F; // EDCBA
    let y = byte >> 5; // HGF

    let (code6, alt6) = FIVE_SIX[x as usize];
    let (six, rd_mid) = sub_block_encode(code6, alt6, 6, rd);

    // The alternate 7 sub-block avoids runs of five that would mimic a
    // comma across the sub-block boundary.
    let use_a7 = (rd_mid == Disparity::Minus && matches!(x, 17 | 18 | 20))
        || (rd_mid == Disparity::Plus && matches!(x, 11 | 13 | 14));
    let (code4, alt4) = if y == 7 && use_a7 { A7 } else { THREE_FOUR[y as usize] };
    let (four, rd_out) = sub_block_encode(code4, alt4, 4, rd_mid);

    (((six as u16) << 4) | four as u16, rd_out)
}

/// Encodes a byte sequence, threading the running disparity through all
/// groups. Output length is exactly 10 bits per input byte.
pub fn encode_8b10b(payload: &[u8], rd0: Disparity) -> (BitStream, Disparity) {
    let mut bits = BitStream::with_capacity(payload.len() * 10);
    let mut rd = rd0;
    for &byte in payload {
        let (group, rd_next) = encode_byte_8b10b(byte, rd);
        for shift in (0..10).rev() {
            bits.push(((group >> shift) & 1) as u8);
        }
        rd = rd_next;
    }
    (bits, rd)
}

struct DecodeTables {
    /// Decoded byte for each valid 10-bit word.
    byte_of: [Option<u8>; 1024],
    /// Whether the word is one the encoder produces starting from RD- / RD+.
    valid_from: [[bool; 1024]; 2],
}

fn decode_tables() -> &'static DecodeTables {
    static TABLES: OnceLock<DecodeTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut t =
            DecodeTables { byte_of: [None; 1024], valid_from: [[false; 1024]; 2] };
        for byte in 0..=255u8 {
            for (rd_idx, rd) in [Disparity::Minus, Disparity::Plus].into_iter().enumerate() {
                let (group, _) = encode_byte_8b10b(byte, rd);
                let g = group as usize;
                if let Some(existing) = t.byte_of[g] {
                    assert_eq!(existing, byte, "8B/10B table conflict at word {group:#012b}");
                }
                t.byte_of[g] = Some(byte);
                t.valid_from[rd_idx][g] = true;
            }
        }
        t
    })
}

fn rd_index(rd: Disparity) -> usize {
    match rd {
        Disparity::Minus => 0,
        Disparity::Plus => 1,
    }
}

/// Decodes a stream of 10-bit groups.
///
/// Words outside the code set are flagged and emit a 0x00 placeholder so
/// that downstream bit accounting stays aligned. Words that are valid
/// codewords but inconsistent with the expected running disparity are
/// flagged as disparity errors, and the tracked disparity resynchronizes to
/// the received word's actual ending disparity.
pub fn decode_8b10b(
    bits: &BitStream,
    rd0: Disparity,
) -> Result<(Vec<u8>, Disparity, DecodeFlags), LinecodeError> {
    if bits.len() % 10 != 0 {
        return Err(LinecodeError::LengthNotMultiple { len: bits.len(), multiple: 10 });
    }
    let tables = decode_tables();
    let mut bytes = Vec::with_capacity(bits.len() / 10);
    let mut flags = DecodeFlags::default();
    let mut rd = rd0;

    for (index, chunk) in bits.as_slice().chunks_exact(10).enumerate() {
        let group = chunk.iter().fold(0u16, |acc, &b| (acc << 1) | u16::from(b));
        let net = 2 * group.count_ones() as i32 - 10;
        match tables.byte_of[group as usize] {
            None => {
                flags.invalid_code_positions.push(index);
                bytes.push(0x00);
                // Best-effort resync from the word's own imbalance.
                if net > 0 {
                    rd = Disparity::Plus;
                } else if net < 0 {
                    rd = Disparity::Minus;
                }
            }
            Some(byte) => {
                bytes.push(byte);
                let actual_start = if tables.valid_from[rd_index(rd)][group as usize] {
                    rd
                } else {
                    flags.disparity_error_positions.push(index);
                    rd.flipped()
                };
                rd = if net == 0 { actual_start } else { actual_start.flipped() };
            }
        }
    }
    Ok((bytes, rd, flags))
}

/// Lane pairing used on the 8B/10B PAM4 path: the level is the *linear*
/// combination `2(2a-1) + (2b-1)` of the two lane bits.
///
/// Each coded lane is DC-balanced, and a linear combination of the lanes
/// keeps that balance, so the PAM4 signal inherits the code's spectral
/// notch. A Gray pairing would instead carry a lane-product component with
/// flat low-frequency content, filling the notch floor to within a few dB
/// of the passband.
fn lanes_to_symbol(a: u8, b: u8) -> Pam4Symbol {
    match (a & 1, b & 1) {
        (0, 0) => Pam4Symbol::NegThree,
        (0, 1) => Pam4Symbol::NegOne,
        (1, 0) => Pam4Symbol::PosOne,
        _ => Pam4Symbol::PosThree,
    }
}

fn symbol_to_lanes(s: Pam4Symbol) -> (u8, u8) {
    match s {
        Pam4Symbol::NegThree => (0, 0),
        Pam4Symbol::NegOne => (0, 1),
        Pam4Symbol::PosOne => (1, 0),
        Pam4Symbol::PosThree => (1, 1),
    }
}

/// Encodes a payload bit stream (a multiple of 16 bits) as 8B/10B PAM4.
///
/// The payload is packed into bytes MSB-first and split across two lanes:
/// even-indexed bytes to lane A, odd-indexed to lane B. Each lane is 8B/10B
/// encoded with its own running disparity (both starting at RD-). Symbol i
/// combines lane A bit i (weight 2) with lane B bit i (weight 1) via
/// [`lanes_to_symbol`], giving 10 symbols per 16 payload bits.
pub fn encode_8b10b_pam4(payload: &BitStream) -> Result<Vec<Pam4Symbol>, LinecodeError> {
    if payload.len() % 16 != 0 {
        return Err(LinecodeError::LengthNotMultiple { len: payload.len(), multiple: 16 });
    }
    let bytes = payload.to_bytes_msb_first()?;
    let lane_a: Vec<u8> = bytes.iter().step_by(2).copied().collect();
    let lane_b: Vec<u8> = bytes.iter().skip(1).step_by(2).copied().collect();
    let (bits_a, _) = encode_8b10b(&lane_a, Disparity::Minus);
    let (bits_b, _) = encode_8b10b(&lane_b, Disparity::Minus);

    Ok(bits_a.iter().zip(bits_b.iter()).map(|(a, b)| lanes_to_symbol(a, b)).collect())
}

/// Inverse of [`encode_8b10b_pam4`]: de-interleaves the two bit lanes from
/// the sliced symbols, decodes each lane, and re-merges the byte stream.
///
/// Flag positions refer to payload byte indices.
pub fn decode_8b10b_pam4(
    symbols: &[Pam4Symbol],
) -> Result<(BitStream, DecodeFlags), LinecodeError> {
    if symbols.len() % 10 != 0 {
        return Err(LinecodeError::LengthNotMultiple { len: symbols.len(), multiple: 10 });
    }
    let mut lane_a = BitStream::with_capacity(symbols.len());
    let mut lane_b = BitStream::with_capacity(symbols.len());
    for &s in symbols {
        let (a, b) = symbol_to_lanes(s);
        lane_a.push(a);
        lane_b.push(b);
    }

    let (bytes_a, _, flags_a) = decode_8b10b(&lane_a, Disparity::Minus)?;
    let (bytes_b, _, flags_b) = decode_8b10b(&lane_b, Disparity::Minus)?;

    let mut bytes = Vec::with_capacity(bytes_a.len() + bytes_b.len());
    for (a, b) in bytes_a.iter().zip(bytes_b.iter()) {
        bytes.push(*a);
        bytes.push(*b);
    }

    let mut flags = DecodeFlags::default();
    for p in &flags_a.invalid_code_positions {
        flags.invalid_code_positions.push(2 * p);
    }
    for p in &flags_b.invalid_code_positions {
        flags.invalid_code_positions.push(2 * p + 1);
    }
    flags.invalid_code_positions.sort_unstable();
    for p in &flags_a.disparity_error_positions {
        flags.disparity_error_positions.push(2 * p);
    }
    for p in &flags_b.disparity_error_positions {
        flags.disparity_error_positions.push(2 * p + 1);
    }
    flags.disparity_error_positions.sort_unstable();

    Ok((BitStream::from_bytes_msb_first(&bytes), flags))
}
