//! End-to-end link pipeline tests: noiseless loopbacks, determinism and
//! cross-module invariants that need the whole signal path.

use pamsim_core::harness::{run_link, ExperimentConfig, RinConfig};
use pamsim_core::linecode::{
    decode_8b10b, encode_8b10b, encode_manchester_pam4, pam4_demap, pam4_map, prbs_generate,
    BitStream, Disparity,
};
use pamsim_core::rxdsp::Scheme;

use proptest::prelude::*;

fn noiseless_config(scheme: Scheme) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(scheme, RinConfig { disabled: Some(true), ..Default::default() });
    cfg.n_payload_bits = 40_000;
    cfg.ber.max_payload_bits = 40_000; // one batch; no extension hunting for errors
    cfg.channel.thermal_noise_a_per_sqrthz = 0.0;
    cfg
}

#[test]
fn noiseless_loopback_is_error_free_for_every_scheme() {
    for scheme in Scheme::ALL {
        let report = run_link(&noiseless_config(scheme)).unwrap();
        assert_eq!(report.sync_failures, 0, "{scheme}: sync failed");
        assert!(report.errors.bits_compared > 30_000, "{scheme}");
        assert_eq!(report.errors.bit_errors, 0, "{scheme}: {:?}", report.errors);
        assert_eq!(report.line_symbol_errors, 0, "{scheme}");
        assert!(report.errors.fec_pass);
        // Residual ISI of the 20 GHz receiver after 13-tap equalization.
        assert!(report.equalizer_mse < 5e-2, "{scheme}: mse {}", report.equalizer_mse);
    }
}

#[test]
fn noiseless_loopback_with_raised_cosine_edges_and_oversampling() {
    for scheme in Scheme::ALL {
        let mut cfg = noiseless_config(scheme);
        cfg.samples_per_symbol = 4;
        cfg.pulse.kind = "raised-cosine-edge".into();
        cfg.pulse.rise_time_fraction = 0.25;
        let report = run_link(&cfg).unwrap();
        assert_eq!(report.errors.bit_errors, 0, "{scheme}: {:?}", report.errors);
    }
}

#[test]
fn reports_are_deterministic_for_a_seed() {
    let mut cfg = ExperimentConfig::new(
        Scheme::EightBTenB,
        RinConfig::preset_named("qdash-mode-7"),
    );
    cfg.n_payload_bits = 32_000;
    cfg.ber.max_payload_bits = 64_000;
    cfg.ber.min_errors = 1;
    cfg.channel.received_power_dbm = -12.0;
    cfg.seed = 42;
    let a = run_link(&cfg).unwrap();
    let b = run_link(&cfg).unwrap();
    assert_eq!(a.errors.bit_errors, b.errors.bit_errors);
    assert_eq!(a.errors.bits_compared, b.errors.bits_compared);
    assert_eq!(a.notch_hz, b.notch_hz);
    assert_eq!(a.equalizer_mse, b.equalizer_mse);

    let mut other = cfg.clone();
    other.seed = 43;
    let c = run_link(&other).unwrap();
    assert_ne!(
        (a.errors.bit_errors, a.errors.bits_compared.wrapping_add(a.seed)),
        (c.errors.bit_errors, c.errors.bits_compared.wrapping_add(c.seed)),
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn codec_round_trips_any_payload(bytes in proptest::collection::vec(any::<u8>(), 1..200),
                                     start_plus in any::<bool>()) {
        let rd0 = if start_plus { Disparity::Plus } else { Disparity::Minus };
        let (bits, rd) = encode_8b10b(&bytes, rd0);
        let (decoded, rd_dec, flags) = decode_8b10b(&bits, rd0).unwrap();
        prop_assert_eq!(decoded, bytes);
        prop_assert_eq!(rd_dec, rd);
        prop_assert!(flags.is_clean());
    }

    #[test]
    fn gray_map_round_trips(bits in proptest::collection::vec(0u8..2, 2..400)) {
        let even = bits.len() & !1;
        let stream = BitStream::from_bits(bits[..even].to_vec()).unwrap();
        let symbols = pam4_map(&stream).unwrap();
        prop_assert_eq!(pam4_demap(&symbols), stream);
    }

    #[test]
    fn manchester_stream_mean_is_exactly_zero(seed in 1u64..5000, n in 1usize..300) {
        let bits = prbs_generate(16, seed, 2 * n).unwrap();
        let encoded = encode_manchester_pam4(&pam4_map(&bits).unwrap());
        let sum: i64 = encoded.iter().map(|s| s.level() as i64).sum();
        prop_assert_eq!(sum, 0);
    }
}
