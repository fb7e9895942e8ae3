//! Decision-directed least-mean-squares adaptive equalizer.
//!
//! A symbol-spaced FIR (13 taps by default) initialized to a center spike.
//! The first `training.len()` output symbols use training-directed error
//! `e = d - y`; afterwards the error uses sliced decisions. Tap update is
//! `w <- w + mu * e * x` per output symbol.

use super::RxDspError;
use crate::linecode::Pam4Symbol;
use crate::waveform::Waveform;

/// Adaptive FIR state and adaptation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerState {
    taps: Vec<f64>,
    mu: f64,
    samples_per_symbol_in: usize,
    /// Record taps every this many symbols into the equalize result
    /// (0 disables logging).
    pub tap_log_stride: usize,
}

impl EqualizerState {
    /// Creates a center-spike-initialized equalizer.
    ///
    /// `input_power_hint` is the expected mean-square input level used to
    /// enforce the LMS stability bound `mu < 2 / (taps * power)` at
    /// construction; the bound is re-checked against the measured input
    /// power on every [`dd_lms_equalize`] call.
    pub fn new(
        num_taps: usize,
        mu: f64,
        samples_per_symbol_in: usize,
        input_power_hint: f64,
    ) -> Result<Self, RxDspError> {
        assert!(num_taps >= 1 && num_taps % 2 == 1, "tap count must be odd and positive");
        assert!(
            samples_per_symbol_in == 1 || samples_per_symbol_in == 2,
            "equalizer input must be 1 or 2 samples per symbol"
        );
        let bound = 2.0 / (num_taps as f64 * input_power_hint.max(1e-300));
        if !(mu > 0.0 && mu < bound) {
            return Err(RxDspError::MuUnstable { mu, bound });
        }
        let mut taps = vec![0.0; num_taps];
        taps[num_taps / 2] = 1.0;
        Ok(Self { taps, mu, samples_per_symbol_in, tap_log_stride: 0 })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn num_taps(&self) -> usize {
        self.taps.len()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn center(&self) -> usize {
        self.taps.len() / 2
    }

    pub fn samples_per_symbol_in(&self) -> usize {
        self.samples_per_symbol_in
    }
}

/// Output of an equalization pass.
#[derive(Debug, Clone)]
pub struct EqualizeResult {
    /// Pre-slicer soft values, aligned so `soft[i]` estimates input symbol
    /// `i` (the center-tap delay is already removed). The trailing
    /// `center()` input symbols have no aligned output.
    pub soft: Vec<f64>,
    pub state: EqualizerState,
    /// Mean squared error over the final stretch of the run.
    pub final_mse: f64,
    /// (symbol_index, taps) pairs when logging is enabled.
    pub tap_log: Vec<(usize, Vec<f64>)>,
}

/// Runs the DD-LMS equalizer over a frame-synchronized symbol-rate (or
/// 2 samples/symbol) input.
pub fn dd_lms_equalize(
    rx: &Waveform,
    state: EqualizerState,
    training: &[Pam4Symbol],
) -> Result<EqualizeResult, RxDspError> {
    let stride = state.samples_per_symbol_in;
    let n_symbols = rx.len() / stride;
    let n_taps = state.taps.len();
    if n_symbols < n_taps + training.len() {
        return Err(RxDspError::SignalTooShort {
            got: n_symbols,
            need: n_taps + training.len(),
        });
    }

    // Re-validate the stability bound against the measured input power.
    let probe = (4096 * stride).min(rx.len());
    let power = rx.samples()[..probe].iter().map(|v| v * v).sum::<f64>() / probe as f64;
    let bound = 2.0 / (n_taps as f64 * power.max(1e-300));
    if state.mu >= bound {
        return Err(RxDspError::MuUnstable { mu: state.mu, bound });
    }

    let mut st = state;
    let x = rx.samples();
    let center = st.center();
    let mu = st.mu;
    let n_train = training.len();

    let mut soft = vec![0.0f64; n_symbols - center];
    let mut tap_log = Vec::new();
    let mut mse_acc = 0.0f64;
    let mut mse_count = 0usize;
    let mse_window = 2000.min(n_symbols / 4).max(1);

    for j in 0..n_symbols {
        // y_j = sum_k w_k x_(j-k), zero-padded before the stream start.
        let k_max = j.min(n_taps - 1);
        let mut y = 0.0;
        for k in 0..=k_max {
            y += st.taps[k] * x[(j - k) * stride];
        }
        let sym_index = j as isize - center as isize;
        if !y.is_finite() {
            return Err(RxDspError::Divergence { symbol_index: sym_index.max(0) as usize });
        }
        if sym_index >= 0 {
            soft[sym_index as usize] = y;
        }

        // Adapt once the delay line has filled.
        if j + 1 >= n_taps && sym_index >= 0 {
            let i = sym_index as usize;
            let desired = if i < n_train {
                training[i].level()
            } else {
                Pam4Symbol::slice_soft(y).level()
            };
            let e = desired - y;
            for k in 0..n_taps {
                st.taps[k] += mu * e * x[(j - k) * stride];
            }
            if n_symbols - j <= mse_window {
                mse_acc += e * e;
                mse_count += 1;
            }
            if st.tap_log_stride > 0 && i % st.tap_log_stride == 0 {
                tap_log.push((i, st.taps.clone()));
            }
        }
    }

    let final_mse = if mse_count > 0 { mse_acc / mse_count as f64 } else { 0.0 };
    Ok(EqualizeResult { soft, state: st, final_mse, tap_log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linecode::{pam4_map, prbs_generate};
    use crate::rxdsp::training_sequence;

    fn symbol_waveform(n: usize, seed: u64) -> (Vec<Pam4Symbol>, Vec<f64>) {
        let training = training_sequence();
        let bits = prbs_generate(16, seed, 2 * n).unwrap();
        let payload = pam4_map(&bits).unwrap();
        let mut symbols = training.to_vec();
        symbols.extend_from_slice(&payload);
        let levels = symbols.iter().map(|s| s.level()).collect();
        (symbols, levels)
    }

    #[test]
    fn identity_channel_stays_at_center_spike() {
        let (symbols, levels) = symbol_waveform(5000, 1);
        let rx = Waveform::new(levels, 28e9).unwrap();
        let state = EqualizerState::new(13, 1e-3, 1, 5.0).unwrap();
        let result = dd_lms_equalize(&rx, state, training_sequence()).unwrap();
        assert!(result.final_mse < 1e-6, "mse {}", result.final_mse);
        let taps = result.state.taps();
        assert!((taps[6] - 1.0).abs() < 1e-3);
        for (k, t) in taps.iter().enumerate() {
            if k != 6 {
                assert!(t.abs() < 1e-3, "tap {k} = {t}");
            }
        }
        // Aligned outputs match the symbols.
        for (i, &s) in result.soft.iter().enumerate().skip(12) {
            assert!((s - symbols[i].level()).abs() < 1e-6);
        }
    }

    /// Direct MMSE solve for a symbol-spaced FIR against an ISI channel,
    /// used as the convergence oracle.
    fn mmse_residual(h: &[f64], n_taps: usize, sigma_s2: f64) -> f64 {
        let r_h = |k: usize| -> f64 {
            let mut acc = 0.0;
            for m in 0..h.len() {
                if m + k < h.len() {
                    acc += h[m] * h[m + k];
                }
            }
            acc
        };
        let mut best = f64::INFINITY;
        for delta in 0..(n_taps + h.len()) {
            // R w = p with R_ij = sigma^2 r_h(|i-j|), p_i = sigma^2 h(delta-i).
            let mut a = vec![vec![0.0f64; n_taps + 1]; n_taps];
            for i in 0..n_taps {
                for j in 0..n_taps {
                    a[i][j] = sigma_s2 * r_h((i as isize - j as isize).unsigned_abs());
                }
                let hi = delta as isize - i as isize;
                a[i][n_taps] = if hi >= 0 && (hi as usize) < h.len() {
                    sigma_s2 * h[hi as usize]
                } else {
                    0.0
                };
            }
            // Gaussian elimination with partial pivoting.
            for col in 0..n_taps {
                let pivot = (col..n_taps).max_by(|&p, &q| {
                    a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap()
                }).unwrap();
                a.swap(col, pivot);
                let diag = a[col][col];
                for row in 0..n_taps {
                    if row != col && a[row][col] != 0.0 {
                        let factor = a[row][col] / diag;
                        for c in col..=n_taps {
                            a[row][c] -= factor * a[col][c];
                        }
                    }
                }
            }
            let w: Vec<f64> = (0..n_taps).map(|i| a[i][n_taps] / a[i][i]).collect();
            let mut p_dot_w = 0.0;
            for i in 0..n_taps {
                let hi = delta as isize - i as isize;
                if hi >= 0 && (hi as usize) < h.len() {
                    p_dot_w += sigma_s2 * h[hi as usize] * w[i];
                }
            }
            best = best.min(sigma_s2 - p_dot_w);
        }
        best
    }

    #[test]
    fn isi_channel_converges_to_within_3db_of_mmse() {
        let h = [0.2, 1.0, 0.2];
        let n = 20_000;
        let (symbols, levels) = symbol_waveform(n, 2);
        // Convolve with the ISI channel.
        let mut rx = vec![0.0f64; levels.len()];
        for (i, r) in rx.iter_mut().enumerate() {
            for (m, &hm) in h.iter().enumerate() {
                if i >= m {
                    *r += hm * levels[i - m];
                }
            }
        }
        let rx = Waveform::new(rx, 28e9).unwrap();
        let state = EqualizerState::new(13, 1e-3, 1, 5.0).unwrap();
        let result = dd_lms_equalize(&rx, state, training_sequence()).unwrap();

        let mmse = mmse_residual(&h, 13, 5.0);
        assert!(result.final_mse < 1e-2, "mse {}", result.final_mse);
        assert!(
            result.final_mse <= 2.0 * mmse.max(1e-12) || result.final_mse < 1e-3,
            "lms mse {} vs mmse {}",
            result.final_mse,
            mmse
        );

        // Zero symbol errors after convergence. The channel delays by one
        // symbol, so scan candidate offsets and take the best alignment.
        let settle = 4000;
        let mut best_errors = usize::MAX;
        for delay in 0..3usize {
            let mut errors = 0;
            let mut count = 0;
            for i in settle..result.soft.len() {
                if i < delay {
                    continue;
                }
                let idx = i - delay;
                if idx >= symbols.len() {
                    break;
                }
                if Pam4Symbol::slice_soft(result.soft[i]) != symbols[idx] {
                    errors += 1;
                }
                count += 1;
            }
            if count > 0 {
                best_errors = best_errors.min(errors);
            }
        }
        assert_eq!(best_errors, 0);
    }

    #[test]
    fn unstable_mu_rejected_at_construction() {
        // Unit-power input: bound = 2 / 13 ≈ 0.154.
        let err = EqualizerState::new(13, 0.5, 1, 1.0).unwrap_err();
        match err {
            RxDspError::MuUnstable { mu, bound } => {
                assert_eq!(mu, 0.5);
                assert!((bound - 2.0 / 13.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unstable_mu_rejected_against_measured_power() {
        // Construction passes with an optimistic hint, but the measured
        // constellation power (5) trips the runtime bound.
        let (_, levels) = symbol_waveform(2000, 3);
        let rx = Waveform::new(levels, 28e9).unwrap();
        let state = EqualizerState::new(13, 0.1, 1, 1.0).unwrap();
        assert!(matches!(
            dd_lms_equalize(&rx, state, training_sequence()),
            Err(RxDspError::MuUnstable { .. })
        ));
    }

    #[test]
    fn tap_log_records_trajectories() {
        let (_, levels) = symbol_waveform(1000, 4);
        let rx = Waveform::new(levels, 28e9).unwrap();
        let mut state = EqualizerState::new(13, 1e-3, 1, 5.0).unwrap();
        state.tap_log_stride = 100;
        let result = dd_lms_equalize(&rx, state, training_sequence()).unwrap();
        assert!(result.tap_log.len() >= 9);
        assert!(result.tap_log.iter().all(|(_, taps)| taps.len() == 13));
        // Strictly increasing symbol indices.
        for pair in result.tap_log.windows(2) {
            assert!(pair[1].0 > pair[0].0);
        }
    }
}
