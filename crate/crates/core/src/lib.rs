//! Desk-scale simulation of a 28 GBaud PAM4 intensity-modulated optical link
//! with DC-balanced line coding for low-frequency intensity-noise mitigation.
//!
//! The crate is organised along the signal path:
//!
//! * [`linecode`] — bit sources (PRBS), PAM4 symbol mapping, the 8B/10B codec
//!   with running-disparity state, and the Manchester-over-PAM4 codec.
//! * [`waveform`] — symbol-to-waveform synthesis, Welch PSD estimation,
//!   spectral-notch measurement, polyphase resampling and normalization.
//! * [`channel`] — colored relative-intensity-noise (RIN) synthesis, MZM
//!   quadrature modulation with arcsine predistortion, and the
//!   photoreceiver model (thermal noise, AC coupling, Bessel low-pass).
//! * [`rxdsp`] — frame synchronization, 13-tap decision-directed LMS
//!   equalization, PAM4 slicing, per-scheme decoding and error counting.
//! * [`harness`] — experiment configuration, end-to-end link runs, power
//!   calibration, sweeps and CSV reporting.

pub mod channel;
pub mod harness;
pub mod linecode;
pub mod rxdsp;
pub mod util;
pub mod waveform;
