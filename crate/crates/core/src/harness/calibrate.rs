//! Power-axis calibration.
//!
//! The paper's absolute power axis depends on unpublished receiver
//! constants, so the thermal-noise density is treated as the one free knob:
//! bisection pins the uncoded curve to a chosen (power, BER) anchor, and
//! every comparison afterwards is relative to that calibrated receiver.

use super::config::ExperimentConfig;
use super::link::run_link;
use super::HarnessError;
use crate::channel::ChannelConfig;
use crate::rxdsp::Scheme;
use crate::util::derive_seed;

/// Calibrates `thermal_noise_a_per_sqrthz` so the uncoded link passes
/// through `(target_power_dbm, target_ber)`, returning the calibrated
/// channel configuration.
///
/// The BER must be bracketable: the noise floor of the configured profile
/// at the target power has to sit below the target, and some thermal
/// density must push the link above it.
pub fn calibrate_power_axis(
    cfg: &ExperimentConfig,
    target_power_dbm: f64,
    target_ber: f64,
) -> Result<ChannelConfig, HarnessError> {
    if !(target_ber > 0.0 && target_ber < 0.4) {
        return Err(HarnessError::CalibrationFailure(format!(
            "target BER {target_ber} is not attainable by bisection"
        )));
    }

    let mut base = cfg.clone();
    base.scheme = Scheme::Uncoded;
    base.sweep = None;
    base.channel.received_power_dbm = target_power_dbm;

    let mut eval_index = 0u64;
    let mut eval = |density: f64| -> Result<f64, HarnessError> {
        let mut point = base.clone();
        point.channel.thermal_noise_a_per_sqrthz = density;
        point.seed = derive_seed(base.seed, 0xCA11B + eval_index);
        eval_index += 1;
        Ok(run_link(&point)?.errors.ber)
    };

    // Establish a bracket in density.
    let mut lo = 1e-14;
    let ber_lo = eval(lo)?;
    if ber_lo > target_ber {
        return Err(HarnessError::CalibrationFailure(format!(
            "noise floor BER {ber_lo:.3e} at {target_power_dbm} dBm already exceeds the target {target_ber:.3e}"
        )));
    }
    let mut hi = 2e-11;
    let mut ber_hi = eval(hi)?;
    let mut grow = 0;
    while ber_hi < target_ber {
        hi *= 4.0;
        ber_hi = eval(hi)?;
        grow += 1;
        if grow > 10 {
            return Err(HarnessError::CalibrationFailure(
                "could not bracket the target BER from above".into(),
            ));
        }
    }

    // Log-domain bisection; Monte-Carlo jitter per evaluation is bounded by
    // the configured error budget.
    for _ in 0..14 {
        let mid = (lo * hi).sqrt();
        let ber_mid = eval(mid)?;
        if ber_mid < target_ber {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut calibrated = cfg.channel.clone();
    calibrated.thermal_noise_a_per_sqrthz = (lo * hi).sqrt();
    calibrated.received_power_dbm = target_power_dbm;
    Ok(calibrated)
}
