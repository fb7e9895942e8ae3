//! Quadrature-biased single-drive MZM with arcsine predistortion.
//!
//! At the quadrature point the modulator transfer is
//! `P = P_avg (1 + sin(pi v))` with `v` in Vpi units. Predistorting the
//! normalized symbol waveform with `v = asin(m x) / pi` makes the
//! composition exactly linear in `x`, so the four PAM4 intensity levels
//! come out equally spaced.

use super::ChannelError;
use crate::waveform::Waveform;

/// Maps a [-1, +1]-normalized symbol waveform to the drive voltage (in Vpi
/// units) that linearizes the quadrature MZM: `v = asin(mod_index * x) / pi`.
pub fn predistort(symbol_waveform: &Waveform, mod_index: f64) -> Result<Waveform, ChannelError> {
    if !(mod_index > 0.0 && mod_index <= 1.0) {
        return Err(ChannelError::BadConfig("mod_index must lie in (0, 1]".into()));
    }
    let mut drive = Vec::with_capacity(symbol_waveform.len());
    for (index, &x) in symbol_waveform.samples().iter().enumerate() {
        let u = mod_index * x;
        if u.abs() > 1.0 {
            return Err(ChannelError::PredistortRange { index, value: u.abs() });
        }
        drive.push(u.asin() / std::f64::consts::PI);
    }
    Ok(Waveform::new(drive, symbol_waveform.sample_rate())?)
}

/// Quadrature-biased MZM intensity transfer: `P(t) = p_avg (1 + sin(pi v))`.
/// Output is nonnegative for every drive.
pub fn mzm_modulate(drive: &Waveform, p_avg_w: f64) -> Result<Waveform, ChannelError> {
    if p_avg_w <= 0.0 {
        return Err(ChannelError::BadConfig("p_avg_w must be positive".into()));
    }
    let out = drive
        .samples()
        .iter()
        .map(|&v| p_avg_w * (1.0 + (std::f64::consts::PI * v).sin()))
        .collect();
    Ok(Waveform::new(out, drive.sample_rate())?)
}
