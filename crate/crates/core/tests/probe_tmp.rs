// Temporary tuning probe (deleted before ship).
use pamsim_core::harness::{calibrate_power_axis, run_link, ExperimentConfig, RinConfig};
use pamsim_core::rxdsp::Scheme;

fn base_cfg() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(Scheme::Uncoded, RinConfig::preset_named("ecl-flat"));
    cfg.n_payload_bits = 500_000;
    cfg.ber.max_payload_bits = 10_000_000;
    cfg.ber.min_errors = 40;
    cfg.channel.ac_coupling_cutoff_hz = 25e6;
    cfg.seed = 11;
    cfg
}

#[test]
fn probe_c6_calibrate_and_crossings() {
    let t = std::time::Instant::now();
    let cal = calibrate_power_axis(&base_cfg(), -7.0, 5e-6).unwrap();
    println!("calibrated thermal = {:.4e} A/rtHz in {:.0}s", cal.thermal_noise_a_per_sqrthz, t.elapsed().as_secs_f64());

    let mut cfg = base_cfg();
    cfg.channel = cal.clone();
    cfg.ber.min_errors = 60;
    cfg.ber.max_payload_bits = 40_000_000;

    for (scheme, powers) in [
        (Scheme::Uncoded, vec![-8.5, -8.0, -7.5, -7.0, -6.5]),
        (Scheme::EightBTenB, vec![-8.5, -8.0, -7.5, -7.0]),
        (Scheme::Manchester, vec![-12.0, -11.5, -11.0, -10.5]),
    ] {
        for p in powers {
            let t = std::time::Instant::now();
            let mut c = cfg.clone();
            c.scheme = scheme;
            c.channel.received_power_dbm = p;
            c.seed = 100 + (p * -10.0) as u64;
            let r = run_link(&c).unwrap();
            println!("{scheme} @ {p:5} dBm: ber {:.3e} ({} errs / {:.1e} bits) [{:.0}s]",
                r.errors.ber, r.errors.bit_errors, r.errors.bits_compared as f64, t.elapsed().as_secs_f64());
        }
    }
}
