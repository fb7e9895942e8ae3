//! End-to-end link execution with Monte-Carlo batch extension.
//!
//! One run simulates payload -> encode -> synthesize -> predistort -> MZM ->
//! channel -> resample -> normalize -> frame sync -> DD-LMS -> decode ->
//! error counting, in independent seeded batches, extending until the error
//! budget is met or the payload cap is reached.

use std::time::Instant;

use super::config::{ExperimentConfig, CONSTELLATION_POWER};
use super::HarnessError;
use crate::channel::{
    apply_channel, average_rin_profile, bessel_group_delay_dc, mzm_modulate, predistort,
    RinProfile,
};
use crate::linecode::{
    encode_8b10b_pam4, encode_manchester_pam4, pam4_map, prbs_generate, BitStream, Pam4Symbol,
};
use crate::rxdsp::{
    count_errors, dd_lms_equalize, decode_chain, frame_sync, training_sequence, EqualizerState,
    ErrorReport, Scheme,
};
use crate::util::derive_seed;
use crate::waveform::{
    normalize, notch_width, resample, sample_values_at, synthesize, welch_psd, Waveform, WindowKind,
};

/// Untracked line symbols wrapped around the frame so that filter edges and
/// the equalizer delay never touch counted payload.
const HEAD_PAD_SYMBOLS: usize = 16;
const TAIL_PAD_SYMBOLS: usize = 32;

/// Per-run results.
#[derive(Debug, Clone)]
pub struct LinkReport {
    pub scheme: Scheme,
    pub seed: u64,
    pub baud_hz: f64,
    pub received_power_dbm: f64,
    /// Payload-domain error counts, accumulated over batches, settling
    /// excluded.
    pub errors: ErrorReport,
    /// Line-symbol (slicer-domain) error counts over the same span.
    pub line_symbol_errors: u64,
    pub line_symbols_compared: u64,
    pub line_ser: f64,
    /// Band-averaged RIN of the configured profile (analytic).
    pub avg_rin_5g_db: f64,
    pub avg_rin_30g_db: f64,
    /// Spectral notch of the transmitted waveform at -3 dB.
    pub notch_hz: f64,
    /// Final equalizer MSE of the last batch.
    pub equalizer_mse: f64,
    /// 8B/10B decoder diagnostics accumulated over batches.
    pub invalid_groups: u64,
    pub disparity_errors: u64,
    pub sync_failures: u64,
    pub batches: u64,
    /// Whether the min-error budget was met before the payload cap.
    pub resolved: bool,
    /// Equalizer tap trajectory of the first batch when
    /// `equalizer.tap_log_stride` is nonzero.
    pub tap_log: Vec<(usize, Vec<f64>)>,
    pub wall_clock_seconds: f64,
}

impl LinkReport {
    /// True when the point should be read as an upper bound, not a rate.
    pub fn below_resolution(&self) -> bool {
        !self.resolved
    }
}

fn encode_line_symbols(
    scheme: Scheme,
    payload: &BitStream,
) -> Result<Vec<Pam4Symbol>, HarnessError> {
    Ok(match scheme {
        Scheme::Uncoded => pam4_map(payload)?,
        Scheme::EightBTenB => encode_8b10b_pam4(payload)?,
        Scheme::Manchester => encode_manchester_pam4(&pam4_map(payload)?),
    })
}

/// Fixed filler symbols, deliberately uncorrelated with the training
/// sequence so they cannot confuse synchronization.
fn pad_symbols(n: usize, tag: u64) -> Vec<Pam4Symbol> {
    let bits = prbs_generate(10, tag | 1, 2 * n).expect("valid pad parameters");
    pam4_map(&bits).expect("even length")
}

struct BatchOutcome {
    bit_errors: u64,
    bits_counted: u64,
    symbol_errors: u64,
    symbols_counted: u64,
    line_symbol_errors: u64,
    line_symbols_compared: u64,
    invalid_groups: u64,
    disparity_errors: u64,
    equalizer_mse: f64,
    synced: bool,
    notch_hz: Option<f64>,
    tap_log: Vec<(usize, Vec<f64>)>,
}

/// Builds one frame's transmitted waveform: payload encoded per scheme,
/// wrapped with the training header and untracked pad symbols.
pub(crate) fn frame_line_symbols(
    cfg: &ExperimentConfig,
    batch_bits: usize,
    batch_index: u64,
) -> Result<(BitStream, Vec<Pam4Symbol>, Vec<Pam4Symbol>), HarnessError> {
    let training = training_sequence();
    // Independent, reproducible randomness per batch.
    let prbs_seed = if batch_index == 0 {
        cfg.prbs.seed
    } else {
        derive_seed(cfg.prbs.seed, batch_index) | 1
    };
    let payload = prbs_generate(cfg.prbs.order, prbs_seed, batch_bits)
        .map_err(|e| HarnessError::in_stage("payload")(e.into()))?;
    let payload_line = encode_line_symbols(cfg.scheme, &payload)
        .map_err(HarnessError::in_stage("encode"))?;

    let mut line =
        Vec::with_capacity(HEAD_PAD_SYMBOLS + 32 + payload_line.len() + TAIL_PAD_SYMBOLS);
    line.extend_from_slice(&pad_symbols(HEAD_PAD_SYMBOLS, 0x155));
    line.extend_from_slice(training);
    line.extend_from_slice(&payload_line);
    line.extend_from_slice(&pad_symbols(TAIL_PAD_SYMBOLS, 0x2AA));
    Ok((payload, payload_line, line))
}

/// The transmitted waveform of the configured link's first frame, as fed to
/// the modulator. Used for transmit-spectrum reports.
pub fn transmit_waveform(cfg: &ExperimentConfig) -> Result<crate::waveform::Waveform, HarnessError> {
    cfg.validate()?;
    let frame_bits = cfg.scheme.payload_frame_bits() as u64;
    let batch_bits =
        (cfg.n_payload_bits.max(frame_bits).div_ceil(frame_bits) * frame_bits) as usize;
    let (_, _, line) = frame_line_symbols(cfg, batch_bits, 0)?;
    synthesize(&line, cfg.baud_hz, cfg.samples_per_symbol, cfg.pulse.shape()?)
        .map_err(|e| HarnessError::in_stage("synthesize")(e.into()))
}

fn run_batch(
    cfg: &ExperimentConfig,
    profile: &RinProfile,
    batch_bits: usize,
    batch_index: u64,
    want_notch: bool,
) -> Result<BatchOutcome, HarnessError> {
    let scheme = cfg.scheme;
    let training = training_sequence();

    let (payload, payload_line, line) = frame_line_symbols(cfg, batch_bits, batch_index)?;
    let n_line = payload_line.len();

    let tx = synthesize(&line, cfg.baud_hz, cfg.samples_per_symbol, cfg.pulse.shape()?)
        .map_err(|e| HarnessError::in_stage("synthesize")(e.into()))?;

    let notch_hz = if want_notch {
        let seg = 4096.min((tx.len() / 8).next_power_of_two() / 2).max(256);
        let psd = welch_psd(&tx, seg, 0.5, WindowKind::Hann)
            .map_err(|e| HarnessError::in_stage("psd")(e.into()))?;
        Some(
            notch_width(&psd, cfg.baud_hz, -3.0)
                .map_err(|e| HarnessError::in_stage("notch")(e.into()))?,
        )
    } else {
        None
    };

    // Normalized drive, arcsine predistortion, quadrature MZM.
    let x = Waveform::new(tx.samples().iter().map(|s| s / 3.0).collect(), tx.sample_rate())
        .map_err(|e| HarnessError::in_stage("drive")(e.into()))?;
    let drive = predistort(&x, cfg.channel.mod_index)
        .map_err(|e| HarnessError::in_stage("predistort")(e.into()))?;
    let intensity = mzm_modulate(&drive, 1e-3)
        .map_err(|e| HarnessError::in_stage("mzm")(e.into()))?;

    let mut ch_cfg = cfg.channel.clone();
    ch_cfg.seed = derive_seed(derive_seed(cfg.seed, 0xC0FFEE), batch_index);
    let photocurrent = apply_channel(&intensity, profile, &ch_cfg)
        .map_err(|e| HarnessError::in_stage("channel")(e.into()))?;

    // Rate-convert captures above 2 samples/symbol down to the working
    // rate, then pick waveform values at symbol centers; the Bessel group
    // delay is known and flat, so the sampling grid absorbs it.
    let captured = if cfg.samples_per_symbol > 2 {
        resample(&photocurrent, 2.0 * cfg.baud_hz)
            .map_err(|e| HarnessError::in_stage("resample")(e.into()))?
    } else {
        photocurrent
    };
    let tau = bessel_group_delay_dc(ch_cfg.rx_filter_order, ch_cfg.rx_bandwidth_hz);
    let t0 = 0.5 / cfg.baud_hz + tau;
    let at_symbol_rate = sample_values_at(&captured, cfg.baud_hz, t0)
        .map_err(|e| HarnessError::in_stage("resample")(e.into()))?;

    let normalized = normalize(&at_symbol_rate)
        .map_err(|e| HarnessError::in_stage("normalize")(e.into()))?;
    let scaled = Waveform::new(
        normalized.samples().iter().map(|v| v * CONSTELLATION_POWER.sqrt()).collect(),
        normalized.sample_rate(),
    )
    .map_err(|e| HarnessError::in_stage("normalize")(e.into()))?;

    // Bounded synchronization search around the frame head.
    let search_len = (HEAD_PAD_SYMBOLS + 32 + 96).min(scaled.len());
    let head = Waveform::new(scaled.samples()[..search_len].to_vec(), scaled.sample_rate())
        .map_err(|e| HarnessError::in_stage("sync")(e.into()))?;
    let sync = frame_sync(&head, training).map_err(|e| HarnessError::in_stage("sync")(e.into()))?;
    if !sync.found {
        return Ok(BatchOutcome {
            bit_errors: 0,
            bits_counted: 0,
            symbol_errors: 0,
            symbols_counted: 0,
            line_symbol_errors: 0,
            line_symbols_compared: 0,
            invalid_groups: 0,
            disparity_errors: 0,
            equalizer_mse: f64::NAN,
            synced: false,
            notch_hz,
            tap_log: Vec::new(),
        });
    }

    let eq_in = Waveform::new(
        scaled.samples()[sync.sample_offset..].to_vec(),
        scaled.sample_rate(),
    )
    .map_err(|e| HarnessError::in_stage("equalize")(e.into()))?;
    let mut state = EqualizerState::new(
        cfg.equalizer.num_taps,
        cfg.equalizer.mu,
        cfg.equalizer.samples_per_symbol_in,
        CONSTELLATION_POWER,
    )
    .map_err(|e| HarnessError::in_stage("equalize")(e.into()))?;
    state.tap_log_stride = if batch_index == 0 { cfg.equalizer.tap_log_stride } else { 0 };
    let eq = dd_lms_equalize(&eq_in, state, training)
        .map_err(|e| HarnessError::in_stage("equalize")(e.into()))?;

    if eq.soft.len() < 32 + n_line {
        return Err(HarnessError::Validation(format!(
            "equalized stream too short: {} soft symbols for {} line symbols",
            eq.soft.len(),
            n_line
        )));
    }
    let soft_payload = &eq.soft[32..32 + n_line];

    // Slicer-domain symbol errors, settling excluded.
    let settle_line = cfg.equalizer.settling_symbols.min(n_line);
    let mut line_symbol_errors = 0u64;
    for (soft, sent) in soft_payload[settle_line..].iter().zip(&payload_line[settle_line..]) {
        if !soft.is_finite() {
            return Err(HarnessError::in_stage("slice")(
                crate::rxdsp::RxDspError::NonFiniteSoft(0).into(),
            ));
        }
        if Pam4Symbol::slice_soft(*soft) != *sent {
            line_symbol_errors += 1;
        }
    }

    let (decoded, flags) =
        decode_chain(soft_payload, scheme).map_err(|e| HarnessError::in_stage("decode")(e.into()))?;

    // Map the settling span to whole payload frames.
    let frame_syms = scheme.line_frame_symbols();
    let settle_frames = settle_line.div_ceil(frame_syms);
    let settle_bits = settle_frames * scheme.payload_frame_bits();
    let tx_tail = BitStream::from_bits(payload.as_slice()[settle_bits..].to_vec())
        .expect("payload bits are bits");
    let rx_tail = BitStream::from_bits(decoded.as_slice()[settle_bits..].to_vec())
        .expect("decoded bits are bits");
    let counted =
        count_errors(&tx_tail, &rx_tail).map_err(|e| HarnessError::in_stage("count")(e.into()))?;

    Ok(BatchOutcome {
        bit_errors: counted.bit_errors,
        bits_counted: counted.bits_compared,
        symbol_errors: counted.symbol_errors,
        symbols_counted: counted.symbols_compared,
        line_symbol_errors,
        line_symbols_compared: (n_line - settle_line) as u64,
        invalid_groups: flags.invalid_code_positions.len() as u64,
        disparity_errors: flags.disparity_error_positions.len() as u64,
        equalizer_mse: eq.final_mse,
        synced: true,
        notch_hz,
        tap_log: eq.tap_log,
    })
}

/// Executes the full link for one configuration.
///
/// Batches of `n_payload_bits` run with independent derived seeds until at
/// least `ber.min_errors` bit errors have been counted or
/// `ber.max_payload_bits` have been compared. Failed synchronization is a
/// reported outcome, not an error; a run where every batch loses sync
/// reports zero compared bits.
pub fn run_link(cfg: &ExperimentConfig) -> Result<LinkReport, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let profile = cfg.rin.resolve()?;

    let frame_bits = cfg.scheme.payload_frame_bits() as u64;
    let batch_bits = (cfg.n_payload_bits.max(frame_bits).div_ceil(frame_bits) * frame_bits) as usize;
    // The settling window must leave something to count.
    let batch_line_symbols = cfg.scheme.line_symbols_for_payload_bits(batch_bits);
    if cfg.equalizer.settling_symbols + 1000 > batch_line_symbols {
        return Err(HarnessError::Validation(format!(
            "settling window of {} symbols leaves too little of the {}-symbol batch",
            cfg.equalizer.settling_symbols, batch_line_symbols
        )));
    }

    let mut bit_errors = 0u64;
    let mut bits = 0u64;
    let mut symbol_errors = 0u64;
    let mut symbols = 0u64;
    let mut line_errors = 0u64;
    let mut line_syms = 0u64;
    let mut invalid_groups = 0u64;
    let mut disparity_errors = 0u64;
    let mut sync_failures = 0u64;
    let mut batches = 0u64;
    let mut notch_hz = 0.0;
    let mut equalizer_mse = f64::NAN;
    let mut tap_log = Vec::new();

    let max_bits = cfg.ber.max_payload_bits.max(batch_bits as u64);
    loop {
        let outcome = run_batch(cfg, &profile, batch_bits, batches, batches == 0)?;
        batches += 1;
        if let Some(n) = outcome.notch_hz {
            notch_hz = n;
        }
        if !outcome.tap_log.is_empty() {
            tap_log = outcome.tap_log;
        }
        if outcome.synced {
            bit_errors += outcome.bit_errors;
            bits += outcome.bits_counted;
            symbol_errors += outcome.symbol_errors;
            symbols += outcome.symbols_counted;
            line_errors += outcome.line_symbol_errors;
            line_syms += outcome.line_symbols_compared;
            invalid_groups += outcome.invalid_groups;
            disparity_errors += outcome.disparity_errors;
            equalizer_mse = outcome.equalizer_mse;
        } else {
            sync_failures += 1;
            if sync_failures >= 3 && bits == 0 {
                break;
            }
        }
        if bits >= max_bits {
            break;
        }
        if bit_errors >= cfg.ber.min_errors && bits >= cfg.n_payload_bits {
            break;
        }
    }

    let resolved = bit_errors >= cfg.ber.min_errors;
    let errors = ErrorReport::from_counts(bit_errors, bits, symbol_errors, symbols);

    // Band-averaged RIN from the profile, clamped to its coverage.
    let cover = profile.max_freq_hz();
    let avg = |hi: f64| {
        average_rin_profile(&profile, (0.0, hi.min(cover * 0.999999)))
            .unwrap_or(f64::NEG_INFINITY)
            .max(-400.0)
    };

    Ok(LinkReport {
        scheme: cfg.scheme,
        seed: cfg.seed,
        baud_hz: cfg.baud_hz,
        received_power_dbm: cfg.channel.received_power_dbm,
        errors,
        line_symbol_errors: line_errors,
        line_symbols_compared: line_syms,
        line_ser: if line_syms > 0 { line_errors as f64 / line_syms as f64 } else { 0.0 },
        avg_rin_5g_db: avg(5e9),
        avg_rin_30g_db: avg(30e9),
        notch_hz,
        equalizer_mse,
        invalid_groups,
        disparity_errors,
        sync_failures,
        batches,
        resolved,
        tap_log,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}
