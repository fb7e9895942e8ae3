//! Small numeric helpers shared across modules.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Convert a linear power quantity to decibels. Zero maps to `f64::NEG_INFINITY`.
pub fn lin_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Convert decibels to a linear power quantity. `NEG_INFINITY` maps to zero.
pub fn db_to_lin(db: f64) -> f64 {
    if db == f64::NEG_INFINITY {
        0.0
    } else {
        10f64.powf(db / 10.0)
    }
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Median of a slice (copies and sorts; NaNs must not be present).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in median input"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Zeroth-order modified Bessel function of the first kind (power series).
///
/// Used by the Kaiser window; accurate to double precision for the argument
/// range that occurs there (|x| <= ~30).
pub fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=40 {
        term *= half / k as f64;
        let t2 = term * term;
        sum += t2;
        if t2 < sum * 1e-18 {
            break;
        }
    }
    sum
}

/// Forward FFT of a real sequence; returns the full complex spectrum.
pub fn fft_forward_real(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(buf.len());
    fft.process(&mut buf);
    buf
}

/// Inverse FFT returning the real part, scaled by 1/n (rustfft is unnormalized).
pub fn ifft_real(spectrum: &mut [Complex64]) -> Vec<f64> {
    let n = spectrum.len();
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    ifft.process(spectrum);
    let scale = 1.0 / n as f64;
    spectrum.iter().map(|c| c.re * scale).collect()
}

/// Complementary error function via the Chebyshev-fit rational
/// approximation (relative error below 1.2e-7 for all x, which keeps deep
/// Gaussian tails accurate in relative terms).
pub fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let e = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
            .exp();
    if x >= 0.0 {
        e
    } else {
        2.0 - e
    }
}

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// SplitMix64 step, used to derive independent seeds from a base seed.
///
/// Sweep points and Monte-Carlo batches each get their own stream so that
/// runs are reproducible yet statistically independent.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a base seed and a stream index.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream.wrapping_add(0xA076_1D64_78BD_642F)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_round_trip() {
        assert!((lin_to_db(db_to_lin(-145.0)) + 145.0).abs() < 1e-12);
        assert_eq!(db_to_lin(f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn median_odd_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn bessel_i0_reference_values() {
        // Abramowitz & Stegun table values.
        assert!((bessel_i0(0.0) - 1.0).abs() < 1e-15);
        assert!((bessel_i0(1.0) - 1.2660658777520084).abs() < 1e-12);
        assert!((bessel_i0(2.0) - 2.2795853023360673).abs() < 1e-12);
        assert!((bessel_i0(8.0) - 427.56411572180474).abs() < 1e-8);
    }

    #[test]
    fn q_function_reference_values() {
        // Standard normal tail table values, relative tolerance.
        assert!((q_function(0.0) - 0.5).abs() < 1e-7);
        assert!((q_function(1.0) / 0.158655254 - 1.0).abs() < 1e-6);
        assert!((q_function(3.0) / 1.34989803e-3 - 1.0).abs() < 1e-6);
        assert!((q_function(4.0) / 3.16712418e-5 - 1.0).abs() < 1e-6);
        assert!((q_function(5.0) / 2.86651572e-7 - 1.0).abs() < 1e-6);
        assert!((q_function(-1.0) - (1.0 - 0.158655254)).abs() < 1e-7);
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, 0);
        let b = derive_seed(1, 1);
        let c = derive_seed(2, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        // Deterministic.
        assert_eq!(a, derive_seed(1, 0));
    }
}
