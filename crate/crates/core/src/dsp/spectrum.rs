//! FFT-based kernels: band-limited interpolation and the analytic
//! signal.

use crate::error::{Error, Result};
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, Mutex, OnceLock};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

pub(crate) fn plan_forward(len: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().unwrap().plan_fft_forward(len)
}

pub(crate) fn plan_inverse(len: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().unwrap().plan_fft_inverse(len)
}

/// Runs an in-place transform with explicitly managed scratch so the
/// multi-hundred-megabyte buffers of deep interpolations are the only
/// large allocations.
fn run(fft: &Arc<dyn Fft<f64>>, buf: &mut [Complex<f64>]) {
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(buf, &mut scratch);
}

/// Indices of the non-negative-frequency FFT bins whose center
/// frequency lies inside `[lo, hi]` (inclusive) for a transform of
/// `len` points at `sample_rate`. Returns `None` when no bin falls in
/// the band.
pub(crate) fn band_bin_range(len: usize, sample_rate: f64, lo: f64, hi: f64) -> Option<(usize, usize)> {
    let df = sample_rate / len as f64;
    let eps = 1e-9 * df;
    let top = len / 2;
    let k_lo = if lo <= 0.0 { 0 } else { ((lo - eps) / df).ceil().max(0.0) as usize };
    let k_hi_f = (hi + eps) / df;
    let k_hi = (k_hi_f.floor() as usize).min(top);
    if k_lo > k_hi {
        None
    } else {
        Some((k_lo, k_hi))
    }
}

/// Band-limited FFT interpolation.
///
/// The input spectrum is masked to the pass band `band = (lo, hi)` in
/// Hz (bins outside it, including DC when `lo > 0`, are zeroed) and
/// zero-padded `n_over` times, so the inverse transform returns the
/// band-limited signal resampled on a grid `n_over` times finer than
/// the input. Amplitudes are preserved: an in-band unit sinusoid stays
/// a unit sinusoid. The output length is `samples.len() * n_over`.
pub fn fft_interpolate(
    samples: &[f64],
    sample_rate: f64,
    n_over: usize,
    band: (f64, f64),
) -> Result<Vec<f64>> {
    let l = samples.len();
    if l < 16 {
        return Err(Error::Config(format!("interpolation input too short: {l} samples")));
    }
    if n_over < 2 || !n_over.is_power_of_two() {
        return Err(Error::Config(format!(
            "oversampling factor must be a power of two >= 2, got {n_over}"
        )));
    }
    let (lo, hi) = band;
    if !(lo >= 0.0 && lo < hi && hi <= sample_rate / 2.0) {
        return Err(Error::Config(format!(
            "pass band [{lo}, {hi}] Hz is not inside [0, {}] Hz",
            sample_rate / 2.0
        )));
    }

    let mut spec: Vec<Complex<f64>> = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    run(&plan_forward(l), &mut spec);

    let lp = l * n_over;
    let mut padded = vec![Complex::new(0.0, 0.0); lp];
    let scale = 1.0 / l as f64;
    if let Some((k_lo, k_hi)) = band_bin_range(l, sample_rate, lo, hi) {
        for k in k_lo..=k_hi {
            if k == 0 {
                padded[0] = spec[0] * scale;
            } else if 2 * k == l {
                // The Nyquist bin is shared between the spectrum halves.
                padded[k] = spec[k] * (0.5 * scale);
                padded[lp - k] = spec[k] * (0.5 * scale);
            } else {
                padded[k] = spec[k] * scale;
                padded[lp - k] = spec[l - k] * scale;
            }
        }
    }
    drop(spec);

    run(&plan_inverse(lp), &mut padded);
    Ok(padded.iter().map(|c| c.re).collect())
}

/// Ideal band-pass filter by FFT masking at the input's own length.
///
/// Bins whose center frequency lies inside `band = (lo, hi)` Hz
/// (inclusive) are kept and everything else is zeroed, so the filter
/// is an exact spectral projection: applying it twice changes nothing.
/// DC is kept only when `lo` is zero, making a `(0, hi)` band a
/// low-pass and any `lo > 0` band DC-free.
pub fn band_filter(samples: &[f64], sample_rate: f64, band: (f64, f64)) -> Result<Vec<f64>> {
    let l = samples.len();
    if l < 16 {
        return Err(Error::Config(format!("filter input too short: {l} samples")));
    }
    let (lo, hi) = band;
    if !(lo >= 0.0 && lo < hi && hi <= sample_rate / 2.0) {
        return Err(Error::Config(format!(
            "pass band [{lo}, {hi}] Hz is not inside [0, {}] Hz",
            sample_rate / 2.0
        )));
    }
    let mut spec: Vec<Complex<f64>> = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    run(&plan_forward(l), &mut spec);
    let keep = band_bin_range(l, sample_rate, lo, hi);
    for k in 0..=l / 2 {
        let inside = matches!(keep, Some((k_lo, k_hi)) if k >= k_lo && k <= k_hi);
        if !inside {
            spec[k] = Complex::new(0.0, 0.0);
            if k > 0 && k < l - k {
                spec[l - k] = Complex::new(0.0, 0.0);
            }
        }
    }
    run(&plan_inverse(l), &mut spec);
    let scale = 1.0 / l as f64;
    Ok(spec.into_iter().map(|c| c.re * scale).collect())
}

/// Analytic signal by the FFT method: negative-frequency bins are
/// zeroed and positive ones doubled, so the result's real part is the
/// input and its imaginary part the Hilbert transform.
pub fn analytic_signal(samples: &[f64]) -> Result<Vec<Complex<f64>>> {
    let l = samples.len();
    if l < 16 {
        return Err(Error::Config(format!("analytic-signal input too short: {l} samples")));
    }
    let mut spec: Vec<Complex<f64>> = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    run(&plan_forward(l), &mut spec);
    let half = l / 2;
    for (k, bin) in spec.iter_mut().enumerate() {
        if k == 0 || (l % 2 == 0 && k == half) {
            // DC and Nyquist stay untouched.
        } else if k < half || (l % 2 == 1 && k == half) {
            *bin *= 2.0;
        } else {
            *bin = Complex::new(0.0, 0.0);
        }
    }
    run(&plan_inverse(l), &mut spec);
    let scale = 1.0 / l as f64;
    Ok(spec.into_iter().map(|c| c * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    const TAU: f64 = std::f64::consts::TAU;

    #[test]
    fn band_bins_cover_inclusive_edges() {
        // 1024 points at 1024 Hz puts bin k at exactly k Hz.
        assert_eq!(band_bin_range(1024, 1024.0, 100.0, 200.0), Some((100, 200)));
        assert_eq!(band_bin_range(1024, 1024.0, 100.2, 199.8), Some((101, 199)));
        assert_eq!(band_bin_range(1024, 1024.0, 0.0, 2.0), Some((0, 2)));
        assert_eq!(band_bin_range(1024, 1024.0, 100.4, 100.6), None);
    }

    #[test]
    fn interpolation_preserves_an_in_band_tone() {
        let l = 4096;
        let rate = 4096.0;
        let f0 = 1000.0;
        let n_over = 8;
        let x: Vec<f64> = (0..l).map(|i| (TAU * f0 * i as f64 / rate).cos()).collect();
        let y = fft_interpolate(&x, rate, n_over, (900.0, 1100.0)).unwrap();
        assert_eq!(y.len(), l * n_over);
        let fine_rate = rate * n_over as f64;
        let mut worst: f64 = 0.0;
        for (m, &v) in y.iter().enumerate() {
            let want = (TAU * f0 * m as f64 / fine_rate).cos();
            worst = worst.max((v - want).abs());
        }
        assert!(worst < 1e-9, "worst reconstruction error {worst}");
    }

    #[test]
    fn interpolation_passes_through_original_samples() {
        let l = 2048;
        let rate = 2048.0;
        let n_over = 4;
        let x: Vec<f64> = (0..l)
            .map(|i| {
                let t = i as f64 / rate;
                0.7 * (TAU * 500.0 * t).cos() + 0.3 * (TAU * 530.0 * t + 0.4).sin()
            })
            .collect();
        let y = fft_interpolate(&x, rate, n_over, (450.0, 560.0)).unwrap();
        for i in 0..l {
            assert!((y[i * n_over] - x[i]).abs() < 1e-9, "mismatch at sample {i}");
        }
    }

    #[test]
    fn interpolation_rejects_out_of_band_content() {
        let l = 2048;
        let rate = 2048.0;
        let x: Vec<f64> = (0..l).map(|i| (TAU * 300.0 * i as f64 / rate).cos()).collect();
        let y = fft_interpolate(&x, rate, 4, (450.0, 560.0)).unwrap();
        let peak = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(peak < 1e-12, "out-of-band tone leaked through at {peak}");
    }

    #[test]
    fn interpolation_suppresses_out_of_band_noise_below_minus_250_db() {
        let l = 2048;
        let rate = 2048.0;
        let n_over = 4;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..l).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = fft_interpolate(&x, rate, n_over, (400.0, 600.0)).unwrap();
        let mut spec: Vec<Complex<f64>> = y.iter().map(|&v| Complex::new(v, 0.0)).collect();
        run(&plan_forward(spec.len()), &mut spec);
        let (k_lo, k_hi) = band_bin_range(y.len(), rate * n_over as f64, 400.0, 600.0).unwrap();
        let in_band: f64 = (k_lo..=k_hi).map(|k| spec[k].norm_sqr()).sum::<f64>()
            / (k_hi - k_lo + 1) as f64;
        let out_band = (0..y.len() / 2)
            .filter(|k| *k + 2 < k_lo || *k > k_hi + 2)
            .map(|k| spec[k].norm_sqr())
            .fold(0.0f64, f64::max);
        assert!(
            out_band < in_band * 1e-25,
            "out-of-band leakage {:.1} dB",
            10.0 * (out_band / in_band).log10()
        );
    }

    #[test]
    fn interpolation_validates_its_inputs() {
        let x = vec![0.0; 64];
        assert!(fft_interpolate(&x, 64.0, 3, (10.0, 20.0)).is_err());
        assert!(fft_interpolate(&x, 64.0, 1, (10.0, 20.0)).is_err());
        assert!(fft_interpolate(&x, 64.0, 4, (20.0, 10.0)).is_err());
        assert!(fft_interpolate(&x, 64.0, 4, (10.0, 40.0)).is_err());
        assert!(fft_interpolate(&x[..8], 64.0, 4, (10.0, 20.0)).is_err());
    }

    #[test]
    fn band_filter_is_an_exact_projection() {
        let l = 3000; // deliberately not a power of two
        let rate = 48_000.0;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..l).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let once = band_filter(&x, rate, (6_000.0, 18_000.0)).unwrap();
        let twice = band_filter(&once, rate, (6_000.0, 18_000.0)).unwrap();
        let scale = once.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let worst = once
            .iter()
            .zip(&twice)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(worst < 1e-12 * scale, "filter not idempotent: {worst} vs scale {scale}");
    }

    #[test]
    fn band_filter_removes_dc_when_the_band_excludes_it() {
        let l = 1024;
        let rate = 1024.0;
        let x: Vec<f64> = (0..l).map(|i| 0.5 + (TAU * 100.0 * i as f64 / rate).cos()).collect();
        let y = band_filter(&x, rate, (50.0, 150.0)).unwrap();
        let mean = y.iter().sum::<f64>() / l as f64;
        assert!(mean.abs() < 1e-12, "DC survived the mask: {mean}");
        // A low-pass band starting at zero keeps the offset.
        let z = band_filter(&x, rate, (0.0, 150.0)).unwrap();
        let mean_z = z.iter().sum::<f64>() / l as f64;
        assert!((mean_z - 0.5).abs() < 1e-12);
    }

    #[test]
    fn analytic_signal_of_a_tone_has_unit_envelope_and_quadrature() {
        let l = 4096;
        let rate = 4096.0;
        let f0 = 320.0;
        let x: Vec<f64> = (0..l).map(|i| (TAU * f0 * i as f64 / rate).cos()).collect();
        let z = analytic_signal(&x).unwrap();
        let mut worst_re: f64 = 0.0;
        let mut worst_im: f64 = 0.0;
        let mut worst_mag: f64 = 0.0;
        for (i, zi) in z.iter().enumerate() {
            let phase = TAU * f0 * i as f64 / rate;
            worst_re = worst_re.max((zi.re - phase.cos()).abs());
            worst_im = worst_im.max((zi.im - phase.sin()).abs());
            worst_mag = worst_mag.max((zi.norm() - 1.0).abs());
        }
        assert!(worst_re < 1e-9, "in-phase error {worst_re}");
        assert!(worst_im < 1e-9, "quadrature error {worst_im}");
        assert!(worst_mag < 1e-9, "envelope error {worst_mag}");
    }

    #[test]
    fn analytic_signal_rejects_short_input() {
        assert!(analytic_signal(&[0.0; 8]).is_err());
    }
}
