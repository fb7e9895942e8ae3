//! Sampled-signal plumbing: symbol-to-waveform synthesis, PSD estimation,
//! rate conversion and normalization.

mod psd;
mod resample;

pub use psd::{notch_width, welch_psd, Psd, WindowKind};
pub use resample::{resample, resample_with_offset, sample_values_at};

use crate::linecode::Pam4Symbol;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WaveformError {
    #[error("samples_per_symbol must be at least 2 (got {0})")]
    SamplesPerSymbolTooSmall(usize),
    #[error("sample rate must be positive (got {0})")]
    NonPositiveRate(f64),
    #[error("rise_time_fraction must lie in [0, 0.5] (got {0})")]
    RiseFractionOutOfRange(f64),
    #[error("signal is empty")]
    EmptySignal,
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("segment length {segment} exceeds signal length {len}")]
    SegmentTooLong { segment: usize, len: usize },
    #[error("segment length must be at least 2 (got {0})")]
    SegmentTooShort(usize),
    #[error("overlap fraction must lie in [0, 1) (got {0})")]
    BadOverlap(f64),
    #[error("constant signal cannot be normalized")]
    DegenerateSignal,
    #[error("resampling would produce fewer than 2 samples")]
    OutputTooShort,
    #[error("PSD is empty")]
    PsdEmpty,
    #[error("PSD covers only {covered} Hz, need at least {needed} Hz")]
    PsdCoverage { covered: f64, needed: f64 },
    #[error("notch threshold must be negative (got {0} dB)")]
    BadThreshold(f64),
}

/// A uniformly sampled real-valued signal with an explicit sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub(crate) samples: Vec<f64>,
    pub(crate) sample_rate: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self, WaveformError> {
        if sample_rate <= 0.0 || !sample_rate.is_finite() {
            return Err(WaveformError::NonPositiveRate(sample_rate));
        }
        if samples.is_empty() {
            return Err(WaveformError::EmptySignal);
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(WaveformError::NonFiniteSample(i));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()
            / self.samples.len() as f64
    }
}

/// Transmit pulse shaping applied during synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    /// Ideal non-return-to-zero hold.
    NrzRect,
    /// NRZ with raised-cosine level transitions spanning the given fraction
    /// of a symbol period, emulating a band-limited generator.
    RaisedCosineEdge { rise_time_fraction: f64 },
}

/// Renders a symbol stream as a sampled waveform at `baud * samples_per_symbol`.
///
/// Each symbol is held for `samples_per_symbol` samples at its level; with
/// raised-cosine edges the first samples of each symbol ramp from the
/// previous level instead.
pub fn synthesize(
    symbols: &[Pam4Symbol],
    baud: f64,
    samples_per_symbol: usize,
    shape: PulseShape,
) -> Result<Waveform, WaveformError> {
    if samples_per_symbol < 2 {
        return Err(WaveformError::SamplesPerSymbolTooSmall(samples_per_symbol));
    }
    if baud <= 0.0 || !baud.is_finite() {
        return Err(WaveformError::NonPositiveRate(baud));
    }
    if symbols.is_empty() {
        return Err(WaveformError::EmptySignal);
    }
    let rise = match shape {
        PulseShape::NrzRect => 0usize,
        PulseShape::RaisedCosineEdge { rise_time_fraction } => {
            if !(0.0..=0.5).contains(&rise_time_fraction) {
                return Err(WaveformError::RiseFractionOutOfRange(rise_time_fraction));
            }
            ((rise_time_fraction * samples_per_symbol as f64).round() as usize)
                .min(samples_per_symbol)
        }
    };

    let mut samples = Vec::with_capacity(symbols.len() * samples_per_symbol);
    let mut prev = symbols[0].level();
    for &sym in symbols {
        let cur = sym.level();
        for j in 0..samples_per_symbol {
            if j < rise && prev != cur {
                let frac = (j as f64 + 0.5) / rise as f64;
                samples.push(prev + (cur - prev) * 0.5 * (1.0 - (std::f64::consts::PI * frac).cos()));
            } else {
                samples.push(cur);
            }
        }
        prev = cur;
    }
    Waveform::new(samples, baud * samples_per_symbol as f64)
}

/// Z-score normalization: zero mean, unit variance.
pub fn normalize(w: &Waveform) -> Result<Waveform, WaveformError> {
    let mean = w.mean();
    let var = w.variance();
    if var <= 0.0 || var < 1e-24 * mean.mul_add(mean, 1.0) {
        return Err(WaveformError::DegenerateSignal);
    }
    let inv_std = 1.0 / var.sqrt();
    Ok(Waveform {
        samples: w.samples.iter().map(|s| (s - mean) * inv_std).collect(),
        sample_rate: w.sample_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linecode::Pam4Symbol::*;

    #[test]
    fn nrz_hold_is_definitional() {
        let w = synthesize(&[PosOne, PosOne, NegOne], 1.0, 4, PulseShape::NrzRect).unwrap();
        assert_eq!(w.sample_rate(), 4.0);
        assert_eq!(
            w.samples(),
            &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]
        );
    }

    #[test]
    fn constant_symbols_give_constant_waveform() {
        let w = synthesize(&[PosThree; 8], 2.0, 2, PulseShape::NrzRect).unwrap();
        assert!(w.samples().iter().all(|&s| s == 3.0));
    }

    #[test]
    fn sample_rate_is_baud_times_sps() {
        let w = synthesize(&[PosOne; 4], 28e9, 2, PulseShape::NrzRect).unwrap();
        assert_eq!(w.sample_rate(), 56e9);
    }

    #[test]
    fn sps_below_two_rejected() {
        assert_eq!(
            synthesize(&[PosOne], 1.0, 1, PulseShape::NrzRect).unwrap_err(),
            WaveformError::SamplesPerSymbolTooSmall(1)
        );
    }

    #[test]
    fn raised_cosine_edge_ramps_between_levels() {
        let shape = PulseShape::RaisedCosineEdge { rise_time_fraction: 0.5 };
        let w = synthesize(&[NegThree, PosThree], 1.0, 4, shape).unwrap();
        let s = w.samples();
        assert_eq!(&s[0..4], &[-3.0, -3.0, -3.0, -3.0]);
        // Two transition samples strictly between the levels, then the hold.
        assert!(s[4] > -3.0 && s[4] < 3.0);
        assert!(s[5] > s[4] && s[5] < 3.0);
        assert_eq!(&s[6..8], &[3.0, 3.0]);
    }

    #[test]
    fn rc_edge_preserves_symbol_mean_shape() {
        let shape = PulseShape::RaisedCosineEdge { rise_time_fraction: 0.6 };
        assert!(matches!(
            synthesize(&[PosOne], 1.0, 4, shape),
            Err(WaveformError::RiseFractionOutOfRange(_))
        ));
    }

    #[test]
    fn normalize_two_points() {
        let w = Waveform::new(vec![1.0, 3.0], 1.0).unwrap();
        let n = normalize(&w).unwrap();
        assert_eq!(n.samples(), &[-1.0, 1.0]);
    }

    #[test]
    fn normalize_is_affine_invariant() {
        let w = Waveform::new(vec![0.5, -1.25, 3.0, 2.25, -0.75], 1.0).unwrap();
        let scaled =
            Waveform::new(w.samples().iter().map(|s| 2.5 * s + 7.0).collect(), 1.0).unwrap();
        let a = normalize(&w).unwrap();
        let b = normalize(&scaled).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(a.mean().abs() < 1e-12);
        assert!((a.variance() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn normalize_rejects_constant() {
        let w = Waveform::new(vec![5.0, 5.0, 5.0], 1.0).unwrap();
        assert_eq!(normalize(&w).unwrap_err(), WaveformError::DegenerateSignal);
    }

    #[test]
    fn waveform_rejects_non_finite() {
        assert_eq!(
            Waveform::new(vec![0.0, f64::NAN], 1.0).unwrap_err(),
            WaveformError::NonFiniteSample(1)
        );
    }
}
