//! The noise-and-distortion model between encoder and receiver DSP:
//! multiplicative colored intensity noise, quadrature-biased MZM with
//! arcsine predistortion, and a PIN-TIA style photoreceiver with thermal
//! noise, optional AC coupling and a Bessel low-pass.

mod filters;
mod mzm;
mod rin;

pub use filters::{
    apply_frequency_response, bessel_group_delay_dc, bessel_response, highpass1_response,
    noise_equivalent_bandwidth,
};
pub use mzm::{mzm_modulate, predistort};
pub use rin::{
    average_rin_profile, average_rin_spectrum, measure_rin, measure_rin_with_segment, qdash_mode,
    rin_preset, synthesize_rin_noise, RinProfile, RinSpectrum, QDASH_MODE_COUNT,
};

use crate::util::{dbm_to_watts, derive_seed};
use crate::waveform::Waveform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

/// Electron charge in coulombs, for the optional shot-noise term.
const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("RIN profile breakpoints must start at 0 Hz and be strictly increasing")]
    BadBreakpoints,
    #[error("RIN level {0} dB/Hz above the -80 dB/Hz sanity bound")]
    RinTooHigh(f64),
    #[error("profile covers {covered} Hz but {needed} Hz is required")]
    Coverage { covered: f64, needed: f64 },
    #[error("band [{lo}, {hi}] Hz is not a valid averaging band")]
    BadBand { lo: f64, hi: f64 },
    #[error("need at least 2 samples of noise (got {0})")]
    TooFewSamples(usize),
    #[error("intensity sample {0} is negative")]
    NegativeIntensity(usize),
    #[error("signal mean must be positive for intensity processing")]
    NonPositiveMean,
    #[error("drive sample {index}: |mod_index * x| = {value} exceeds 1")]
    PredistortRange { index: usize, value: f64 },
    #[error("invalid channel configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Waveform(#[from] crate::waveform::WaveformError),
}

/// Photoreceiver and modulator parameters.
///
/// The defaults are representative PIN-TIA values; the thermal noise
/// density is the calibration knob that [`crate::harness`] adjusts to pin
/// the power axis.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    /// Mean optical power at the photodiode, dBm.
    pub received_power_dbm: f64,
    /// Photodiode responsivity, A/W.
    pub responsivity_a_per_w: f64,
    /// Input-referred receiver noise current density, A/sqrt(Hz).
    pub thermal_noise_a_per_sqrthz: f64,
    /// Receiver low-pass 3 dB cutoff, Hz.
    pub rx_bandwidth_hz: f64,
    /// Bessel low-pass order, 1..=5.
    pub rx_filter_order: usize,
    /// First-order high-pass cutoff, Hz; 0 disables AC coupling.
    pub ac_coupling_cutoff_hz: f64,
    /// Add a white shot-noise term at the mean photocurrent.
    pub include_shot_noise: bool,
    /// Modulator half-wave voltage, volts. The baseband model works in
    /// Vpi-normalized units; this scales drive voltages reported to users.
    pub vpi_v: f64,
    /// Peak drive as a fraction of Vpi/2 after predistortion, in (0, 1].
    pub mod_index: f64,
    /// RNG seed for the channel noise processes.
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            received_power_dbm: 0.0,
            responsivity_a_per_w: 0.8,
            thermal_noise_a_per_sqrthz: 18e-12,
            rx_bandwidth_hz: 20e9,
            rx_filter_order: 4,
            ac_coupling_cutoff_hz: 0.0,
            include_shot_noise: false,
            vpi_v: 4.0,
            mod_index: 1.0,
            seed: 1,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.rx_bandwidth_hz <= 0.0 {
            return Err(ChannelError::BadConfig("rx_bandwidth_hz must be positive".into()));
        }
        if self.responsivity_a_per_w <= 0.0 {
            return Err(ChannelError::BadConfig("responsivity_a_per_w must be positive".into()));
        }
        if !(self.mod_index > 0.0 && self.mod_index <= 1.0) {
            return Err(ChannelError::BadConfig("mod_index must lie in (0, 1]".into()));
        }
        if !(1..=5).contains(&self.rx_filter_order) {
            return Err(ChannelError::BadConfig("rx_filter_order must lie in 1..=5".into()));
        }
        if self.thermal_noise_a_per_sqrthz < 0.0 {
            return Err(ChannelError::BadConfig("thermal noise density must be >= 0".into()));
        }
        if self.ac_coupling_cutoff_hz < 0.0 {
            return Err(ChannelError::BadConfig("ac_coupling_cutoff_hz must be >= 0".into()));
        }
        if self.vpi_v <= 0.0 {
            return Err(ChannelError::BadConfig("vpi_v must be positive".into()));
        }
        Ok(())
    }
}

/// Detects an optical intensity waveform into a filtered photocurrent.
///
/// `i(t) = R * s * P(t) * (1 + m(t)) + n_th(t) [+ n_shot(t)]`, where `m` is
/// the synthesized relative intensity noise, `n_th` is white Gaussian
/// thermal noise and `s` scales the mean of `P` to the configured received
/// power. The photocurrent then passes the optional first-order AC-coupling
/// high-pass and the Bessel low-pass. Deterministic for a given seed.
pub fn apply_channel(
    intensity: &Waveform,
    profile: &RinProfile,
    cfg: &ChannelConfig,
) -> Result<Waveform, ChannelError> {
    cfg.validate()?;
    if let Some(i) = intensity.samples().iter().position(|&p| p < 0.0) {
        return Err(ChannelError::NegativeIntensity(i));
    }
    let p_mean = intensity.mean();
    if p_mean <= 0.0 {
        return Err(ChannelError::NonPositiveMean);
    }
    let fs = intensity.sample_rate();
    let n = intensity.len();

    let m = synthesize_rin_noise(profile, n, fs, derive_seed(cfg.seed, 1))?;

    let p_rx = dbm_to_watts(cfg.received_power_dbm);
    let scale = cfg.responsivity_a_per_w * p_rx / p_mean;

    let sigma_thermal = cfg.thermal_noise_a_per_sqrthz * (fs / 2.0).sqrt();
    let sigma_shot = if cfg.include_shot_noise {
        // White approximation at the mean photocurrent.
        (2.0 * ELECTRON_CHARGE * cfg.responsivity_a_per_w * p_rx * fs / 2.0).sqrt()
    } else {
        0.0
    };

    let normal = rand_distr::Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng_th = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 2));
    let mut rng_shot = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 3));

    let mut current: Vec<f64> = Vec::with_capacity(n);
    for (i, &p) in intensity.samples().iter().enumerate() {
        let mut v = scale * p * (1.0 + m[i]);
        if sigma_thermal > 0.0 {
            v += sigma_thermal * rng_th.sample(normal);
        }
        if sigma_shot > 0.0 {
            v += sigma_shot * rng_shot.sample(normal);
        }
        current.push(v);
    }
    let current = Waveform::new(current, fs)?;

    let order = cfg.rx_filter_order;
    let f_lp = cfg.rx_bandwidth_hz;
    let f_hp = cfg.ac_coupling_cutoff_hz;
    let filtered = apply_frequency_response(&current, |f| {
        let mut h = bessel_response(order, f_lp, f);
        if f_hp > 0.0 {
            h *= highpass1_response(f_hp, f);
        }
        h
    })?;
    Ok(filtered)
}
