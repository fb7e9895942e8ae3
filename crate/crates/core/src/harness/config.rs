//! Experiment configuration: TOML schema, defaults and validation.
//!
//! A minimal config needs only a scheme and a RIN source:
//!
//! ```toml
//! scheme = "manchester"
//! [rin]
//! preset = "qdash-mode-10"
//! ```
//!
//! Everything else defaults to the reference link: 28 GBaud, order-16 PRBS,
//! 2 samples/symbol, a 20 GHz 4th-order Bessel receiver and a 13-tap DD-LMS
//! equalizer. Unknown keys anywhere in the file are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::HarnessError;
use crate::channel::{ChannelConfig, RinProfile};
use crate::rxdsp::{EqualizerState, Scheme};
use crate::waveform::PulseShape;

/// Nominal PAM4 constellation power (levels ±1, ±3); the equalizer input is
/// restored to this scale, so step-size bounds are checked against it.
pub(crate) const CONSTELLATION_POWER: f64 = 5.0;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PrbsConfig {
    pub order: u32,
    pub seed: u64,
}

impl Default for PrbsConfig {
    fn default() -> Self {
        Self { order: 16, seed: 0xACE1 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    /// "nrz-rect" or "raised-cosine-edge".
    pub kind: String,
    /// Transition time as a fraction of the symbol period (raised-cosine
    /// edges only).
    pub rise_time_fraction: f64,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self { kind: "nrz-rect".into(), rise_time_fraction: 0.25 }
    }
}

impl PulseConfig {
    pub fn shape(&self) -> Result<PulseShape, HarnessError> {
        match self.kind.as_str() {
            "nrz-rect" => Ok(PulseShape::NrzRect),
            "raised-cosine-edge" => {
                Ok(PulseShape::RaisedCosineEdge { rise_time_fraction: self.rise_time_fraction })
            }
            other => Err(HarnessError::Validation(format!(
                "pulse.kind must be \"nrz-rect\" or \"raised-cosine-edge\", got \"{other}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EqualizerConfig {
    pub num_taps: usize,
    pub mu: f64,
    /// Decision-directed symbols excluded from error counting while the
    /// taps settle.
    pub settling_symbols: usize,
    pub samples_per_symbol_in: usize,
    /// Record tap trajectories every N symbols (0 = off).
    pub tap_log_stride: usize,
}

impl Default for EqualizerConfig {
    fn default() -> Self {
        Self {
            num_taps: 13,
            mu: 1e-3,
            // At mu = 1e-3 the slowest tap modes against the 20 GHz
            // receiver need ~2300 symbols to stop making decisions errors;
            // 3000 leaves headroom so counted spans are fully converged.
            settling_symbols: 3000,
            samples_per_symbol_in: 1,
            tap_log_stride: 0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BerBudget {
    /// Extend the run until at least this many bit errors are counted...
    pub min_errors: u64,
    /// ...or this many payload bits have been compared.
    pub max_payload_bits: u64,
}

impl Default for BerBudget {
    fn default() -> Self {
        Self { min_errors: 100, max_payload_bits: 10_000_000 }
    }
}

/// RIN source: exactly one of `preset` or `breakpoints`.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RinConfig {
    /// "ecl-flat", "all-modes" or "qdash-mode-1".."qdash-mode-10".
    pub preset: Option<String>,
    /// Explicit piecewise-constant profile: [[freq_hz, rin_db_per_hz], ...].
    pub breakpoints: Option<Vec<[f64; 2]>>,
    /// Coverage limit for explicit breakpoints (default 1e15 Hz).
    pub max_freq_hz: Option<f64>,
    /// Disable intensity noise entirely (still requires no other source).
    pub disabled: Option<bool>,
}

impl RinConfig {
    pub fn preset_named(name: &str) -> Self {
        Self { preset: Some(name.to_string()), ..Self::default() }
    }

    pub fn resolve(&self) -> Result<RinProfile, HarnessError> {
        let sources = usize::from(self.preset.is_some())
            + usize::from(self.breakpoints.is_some())
            + usize::from(self.disabled == Some(true));
        if sources != 1 {
            return Err(HarnessError::Validation(
                "rin must specify exactly one of preset, breakpoints or disabled".into(),
            ));
        }
        if self.disabled == Some(true) {
            return Ok(RinProfile::disabled());
        }
        if let Some(name) = &self.preset {
            return crate::channel::rin_preset(name).ok_or_else(|| {
                HarnessError::Validation(format!("unknown rin preset \"{name}\""))
            });
        }
        let bps: Vec<(f64, f64)> =
            self.breakpoints.as_ref().unwrap().iter().map(|p| (p[0], p[1])).collect();
        Ok(RinProfile::new(bps, self.max_freq_hz.unwrap_or(1e15))?)
    }
}

/// Parameter sweep request.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// "received_power_dbm", "rin_mode" or "scheme".
    pub parameter: String,
    pub values: Vec<toml::Value>,
}

/// Validated sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    ReceivedPowerDbm(Vec<f64>),
    RinMode(Vec<usize>),
    Scheme(Vec<Scheme>),
}

impl SweepConfig {
    pub fn spec(&self) -> Result<SweepSpec, HarnessError> {
        if self.values.is_empty() {
            return Err(HarnessError::Validation("sweep.values must not be empty".into()));
        }
        let bad = |v: &toml::Value| {
            HarnessError::Validation(format!(
                "sweep value {v} invalid for parameter \"{}\"",
                self.parameter
            ))
        };
        match self.parameter.as_str() {
            "received_power_dbm" => {
                let mut out = Vec::with_capacity(self.values.len());
                for v in &self.values {
                    out.push(
                        v.as_float().or_else(|| v.as_integer().map(|i| i as f64)).ok_or_else(|| bad(v))?,
                    );
                }
                Ok(SweepSpec::ReceivedPowerDbm(out))
            }
            "rin_mode" => {
                let mut out = Vec::with_capacity(self.values.len());
                for v in &self.values {
                    let k = v.as_integer().ok_or_else(|| bad(v))?;
                    if !(1..=crate::channel::QDASH_MODE_COUNT as i64).contains(&k) {
                        return Err(bad(v));
                    }
                    out.push(k as usize);
                }
                Ok(SweepSpec::RinMode(out))
            }
            "scheme" => {
                let mut out = Vec::with_capacity(self.values.len());
                for v in &self.values {
                    let s = v.as_str().ok_or_else(|| bad(v))?;
                    out.push(s.parse::<Scheme>().map_err(HarnessError::Validation)?);
                }
                Ok(SweepSpec::Scheme(out))
            }
            other => Err(HarnessError::Validation(format!(
                "sweep.parameter must be received_power_dbm, rin_mode or scheme (got \"{other}\")"
            ))),
        }
    }
}

fn default_baud() -> f64 {
    28e9
}
fn default_payload_bits() -> u64 {
    200_000
}
fn default_sps() -> usize {
    2
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_seed() -> u64 {
    1
}

/// One fully specified experiment.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    #[serde(default = "default_baud")]
    pub baud_hz: f64,
    #[serde(default)]
    pub prbs: PrbsConfig,
    #[serde(default = "default_payload_bits")]
    pub n_payload_bits: u64,
    #[serde(default = "default_sps")]
    pub samples_per_symbol: usize,
    #[serde(default)]
    pub pulse: PulseConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    pub rin: RinConfig,
    #[serde(default)]
    pub equalizer: EqualizerConfig,
    #[serde(default)]
    pub ber: BerBudget,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl ExperimentConfig {
    /// A programmatic config with defaults, used heavily by tests.
    pub fn new(scheme: Scheme, rin: RinConfig) -> Self {
        Self {
            scheme,
            baud_hz: default_baud(),
            prbs: PrbsConfig::default(),
            n_payload_bits: default_payload_bits(),
            samples_per_symbol: default_sps(),
            pulse: PulseConfig::default(),
            channel: ChannelConfig::default(),
            rin,
            equalizer: EqualizerConfig::default(),
            ber: BerBudget::default(),
            sweep: None,
            output_dir: default_output_dir(),
            seed: default_seed(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.baud_hz <= 0.0 || !self.baud_hz.is_finite() {
            return Err(HarnessError::Validation("baud_hz must be positive".into()));
        }
        if !(7..=31).contains(&self.prbs.order) {
            return Err(HarnessError::Validation(format!(
                "prbs.order must lie in 7..=31 (got {})",
                self.prbs.order
            )));
        }
        if self.prbs.seed == 0 {
            return Err(HarnessError::Validation("prbs.seed must be nonzero".into()));
        }
        if self.n_payload_bits < 16 {
            return Err(HarnessError::Validation("n_payload_bits must be at least 16".into()));
        }
        if self.samples_per_symbol < 2 {
            return Err(HarnessError::Validation(
                "samples_per_symbol must be at least 2".into(),
            ));
        }
        self.pulse.shape()?;
        self.channel.validate()?;

        let profile = self.rin.resolve()?;
        let nyquist = self.baud_hz * self.samples_per_symbol as f64 / 2.0;
        if !profile.covers(nyquist) {
            return Err(HarnessError::Validation(format!(
                "rin profile covers {:.3e} Hz but the sampled bandwidth needs {:.3e} Hz",
                profile.max_freq_hz(),
                nyquist
            )));
        }

        if self.equalizer.num_taps == 0 || self.equalizer.num_taps % 2 == 0 {
            return Err(HarnessError::Validation("equalizer.num_taps must be odd".into()));
        }
        if self.equalizer.samples_per_symbol_in != 1 && self.equalizer.samples_per_symbol_in != 2 {
            return Err(HarnessError::Validation(
                "equalizer.samples_per_symbol_in must be 1 or 2".into(),
            ));
        }
        // Stability bound at the constellation scale the equalizer sees.
        EqualizerState::new(
            self.equalizer.num_taps,
            self.equalizer.mu,
            self.equalizer.samples_per_symbol_in,
            CONSTELLATION_POWER,
        )
        .map_err(|e| HarnessError::Validation(e.to_string()))?;

        if self.ber.min_errors == 0 {
            return Err(HarnessError::Validation("ber.min_errors must be at least 1".into()));
        }
        if let Some(sweep) = &self.sweep {
            sweep.spec()?;
        }
        Ok(())
    }
}

/// Loads and validates a TOML experiment config.
pub fn load_config<P: AsRef<Path>>(path: P) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Parses a TOML config from a string (errors carry line/column context).
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("unknown field") {
            HarnessError::UnknownKey(msg)
        } else {
            HarnessError::Parse(msg)
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}
