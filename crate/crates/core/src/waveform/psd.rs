//! Welch power spectral density estimation and the spectral-notch metric.
//!
//! The estimator averages overlapping windowed periodograms and normalizes
//! to power per hertz, single-sided, so that the integral of the PSD over
//! frequency matches the signal's mean-square value.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::{Waveform, WaveformError};
use crate::util::{lin_to_db, median};

/// Analysis window for [`welch_psd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Hann,
}

/// Single-sided power spectral density on a uniform frequency grid from DC.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    freqs: Vec<f64>,
    /// Linear power density, units of (signal unit)^2 per Hz.
    values: Vec<f64>,
}

impl Psd {
    pub fn new(freqs: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(freqs.len(), values.len());
        Self { freqs, values }
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn values_linear(&self) -> &[f64] {
        &self.values
    }

    pub fn values_db(&self) -> Vec<f64> {
        self.values.iter().map(|&v| lin_to_db(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Grid spacing in Hz.
    pub fn delta_f(&self) -> f64 {
        if self.freqs.len() >= 2 {
            self.freqs[1] - self.freqs[0]
        } else {
            0.0
        }
    }

    /// Riemann integral of the density over the full covered band.
    pub fn total_power(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.delta_f()
    }

    /// Writes `freq_hz,psd_db` rows; floats carry nine significant digits.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "freq_hz,psd_db")?;
        for (f, v) in self.freqs.iter().zip(&self.values) {
            writeln!(out, "{:.8e},{:.8e}", f, lin_to_db(*v).max(-400.0))?;
        }
        Ok(())
    }
}

/// Welch PSD estimate with the given segment length, overlap fraction and
/// window. Single-sided; bin 0 is DC.
pub fn welch_psd(
    w: &Waveform,
    segment_len: usize,
    overlap_fraction: f64,
    window: WindowKind,
) -> Result<Psd, WaveformError> {
    if segment_len < 2 {
        return Err(WaveformError::SegmentTooShort(segment_len));
    }
    if segment_len > w.len() {
        return Err(WaveformError::SegmentTooLong { segment: segment_len, len: w.len() });
    }
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(WaveformError::BadOverlap(overlap_fraction));
    }

    let n = segment_len;
    let fs = w.sample_rate();
    let WindowKind::Hann = window;
    // Periodic Hann, as used for spectral averaging.
    let win: Vec<f64> = (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()))
        .collect();
    let window_power: f64 = win.iter().map(|v| v * v).sum();

    let hop = ((n as f64) * (1.0 - overlap_fraction)).round().max(1.0) as usize;
    let n_bins = n / 2 + 1;
    let mut acc = vec![0.0f64; n_bins];
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf = vec![Complex64::default(); n];

    let mut n_segments = 0usize;
    let mut start = 0usize;
    while start + n <= w.len() {
        for (b, (x, wv)) in buf.iter_mut().zip(w.samples[start..start + n].iter().zip(&win)) {
            *b = Complex64::new(x * wv, 0.0);
        }
        fft.process(&mut buf);
        for (k, a) in acc.iter_mut().enumerate() {
            *a += buf[k].norm_sqr();
        }
        n_segments += 1;
        start += hop;
    }
    debug_assert!(n_segments >= 1);

    let scale = 1.0 / (n_segments as f64 * fs * window_power);
    let values: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            // Double everything except DC and (for even n) the Nyquist bin.
            let one_sided = if k == 0 || (n % 2 == 0 && k == n / 2) { 1.0 } else { 2.0 };
            a * scale * one_sided
        })
        .collect();
    let freqs: Vec<f64> = (0..n_bins).map(|k| k as f64 * fs / n as f64).collect();
    Ok(Psd::new(freqs, values))
}

/// Width of the low-frequency spectral notch of a modulated signal's PSD.
///
/// The passband reference is the median PSD over [0.1, 0.4] times the baud
/// rate. Scanning upward from the first nonzero-frequency bin, the notch
/// ends at the first bin within `|threshold_db|` of that reference; if the
/// very first bin is already there, the signal has no notch and the width
/// is 0. The exact-DC bin is excluded since it only reflects the residual
/// mean of the record.
pub fn notch_width(psd: &Psd, baud: f64, threshold_db: f64) -> Result<f64, WaveformError> {
    if psd.is_empty() {
        return Err(WaveformError::PsdEmpty);
    }
    if threshold_db >= 0.0 {
        return Err(WaveformError::BadThreshold(threshold_db));
    }
    let covered = *psd.freqs().last().unwrap();
    if covered < baud / 2.0 {
        return Err(WaveformError::PsdCoverage { covered, needed: baud / 2.0 });
    }

    let band: Vec<f64> = psd
        .freqs()
        .iter()
        .zip(psd.values_linear())
        .filter(|(f, _)| **f >= 0.1 * baud && **f <= 0.4 * baud)
        .map(|(_, v)| *v)
        .collect();
    if band.is_empty() {
        return Err(WaveformError::PsdCoverage { covered, needed: 0.4 * baud });
    }
    let reference_db = lin_to_db(median(&band));
    let threshold = reference_db + threshold_db;

    for k in 1..psd.len() {
        if lin_to_db(psd.values_linear()[k]) >= threshold {
            return Ok(if k == 1 { 0.0 } else { psd.freqs()[k] });
        }
    }
    // A PSD that never reaches its own passband median cannot occur.
    Ok(covered)
}
