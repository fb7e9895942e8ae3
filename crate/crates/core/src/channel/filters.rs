//! Analog filter responses applied in the frequency domain.
//!
//! The receiver low-pass is a Bessel prototype (maximally flat group
//! delay, so the eye shape survives), evaluated exactly from its pole set
//! and applied by FFT with zero padding long enough to swallow the
//! impulse-response tail.

use rustfft::num_complex::Complex64;

use super::ChannelError;
use crate::waveform::Waveform;

/// Poles of the delay-normalized reversed Bessel polynomials (unit group
/// delay at DC), orders 1..=5, conjugates implied for nonzero imaginary
/// parts.
const BESSEL_POLES: [&[(f64, f64)]; 5] = [
    &[(-1.0, 0.0)],
    &[(-1.5, 0.866_025_403_784_438_6)],
    &[(-2.322_185_354_626_086, 0.0), (-1.838_907_322_686_957, 1.754_380_959_783_721)],
    &[
        (-2.103_789_397_672_795, 2.657_418_041_856_753),
        (-2.896_210_602_327_205, 0.867_234_128_934_503_8),
    ],
    &[
        (-3.646_738_595_329_718, 0.0),
        (-3.351_956_398_699_046, 1.742_661_416_155_538),
        (-2.324_674_303_636_095, 3.571_022_479_702_332),
    ],
];

/// Ratio of the -3 dB frequency to the delay-normalized frequency scale.
const BESSEL_W3DB: [f64; 5] = [1.0, 1.361_654_129, 1.755_672_389, 2.113_917_675, 2.427_410_702];

fn bessel_pole_set(order: usize) -> Vec<Complex64> {
    let mut poles = Vec::with_capacity(order);
    for &(re, im) in BESSEL_POLES[order - 1] {
        if im == 0.0 {
            poles.push(Complex64::new(re, 0.0));
        } else {
            poles.push(Complex64::new(re, im));
            poles.push(Complex64::new(re, -im));
        }
    }
    poles
}

/// Bessel low-pass transfer function at frequency `f` for a -3 dB cutoff
/// of `cutoff_hz`. Unity gain at DC. `order` must lie in 1..=5.
pub fn bessel_response(order: usize, cutoff_hz: f64, f: f64) -> Complex64 {
    debug_assert!((1..=5).contains(&order));
    let s = Complex64::new(0.0, BESSEL_W3DB[order - 1] * f / cutoff_hz);
    let mut h = Complex64::new(1.0, 0.0);
    for p in bessel_pole_set(order) {
        h *= -p / (s - p);
    }
    h
}

/// First-order high-pass (AC coupling) transfer function.
pub fn highpass1_response(cutoff_hz: f64, f: f64) -> Complex64 {
    let jx = Complex64::new(0.0, f / cutoff_hz);
    jx / (Complex64::new(1.0, 0.0) + jx)
}

/// Group delay of the Bessel low-pass at DC, seconds. Bessel filters hold
/// this delay nearly constant across the passband, which is what the link
/// pipeline compensates when it picks symbol sampling instants.
pub fn bessel_group_delay_dc(order: usize, cutoff_hz: f64) -> f64 {
    // Delay-normalized prototypes have unit group delay by construction.
    BESSEL_W3DB[order - 1] / (2.0 * std::f64::consts::PI * cutoff_hz)
}

/// Noise-equivalent bandwidth of a response: ∫|H|² df / |H(0)|², by
/// trapezoidal integration out to where the response has died.
pub fn noise_equivalent_bandwidth<H>(response: H, f_max: f64, steps: usize) -> f64
where
    H: Fn(f64) -> Complex64,
{
    let h0 = response(0.0).norm_sqr();
    let df = f_max / steps as f64;
    let mut acc = 0.0;
    for i in 0..steps {
        let a = response(i as f64 * df).norm_sqr();
        let b = response((i + 1) as f64 * df).norm_sqr();
        acc += 0.5 * (a + b) * df;
    }
    acc / h0
}

/// Filters a waveform by an arbitrary frequency response.
///
/// The signal is zero-padded to the next power of two at least 16384
/// samples beyond its length, transformed, multiplied by `response`
/// (Hermitian symmetry enforced), and transformed back.
pub fn apply_frequency_response<H>(w: &Waveform, response: H) -> Result<Waveform, ChannelError>
where
    H: Fn(f64) -> Complex64,
{
    let n = w.len();
    let n_fft = (n + 16384).next_power_of_two();
    let fs = w.sample_rate();

    let mut buf: Vec<Complex64> = Vec::with_capacity(n_fft);
    buf.extend(w.samples().iter().map(|&x| Complex64::new(x, 0.0)));
    buf.resize(n_fft, Complex64::default());

    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(n_fft).process(&mut buf);

    let half = n_fft / 2;
    for k in 0..=half {
        let h = response(k as f64 * fs / n_fft as f64);
        buf[k] *= h;
        if k != 0 && k != half {
            buf[n_fft - k] = buf[k].conj();
        }
    }

    planner.plan_fft_inverse(n_fft).process(&mut buf);
    let scale = 1.0 / n_fft as f64;
    let out: Vec<f64> = buf[..n].iter().map(|c| c.re * scale).collect();
    Ok(Waveform::new(out, fs)?)
}
