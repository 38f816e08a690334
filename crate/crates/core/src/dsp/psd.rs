//! One-sided power spectral density estimation.

use super::spectrum::{band_bin_range, plan_forward};
use super::window::blackman_window;
use crate::error::{Error, Result};
use num_complex::Complex;

/// Analysis window applied before the periodogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdWindow {
    /// No tapering; best for exactly periodic test signals.
    Rectangular,
    /// Blackman taper; sidelobes low enough to measure noise bands
    /// twelve decades below a nearby carrier.
    Blackman,
}

/// One-sided power spectral density in full-scale-squared per Hz.
#[derive(Debug, Clone)]
pub struct PowerSpectrum {
    /// Bin spacing in Hz; bin `k` is centered at `k * resolution`.
    pub resolution: f64,
    /// Linear density per bin, covering 0 Hz through Nyquist.
    pub density: Vec<f64>,
}

impl PowerSpectrum {
    /// Center frequency of bin `k`, Hz.
    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 * self.resolution
    }

    /// Density of bin `k` in dBFS/Hz, clamped at -400 dB so silent
    /// bins stay finite.
    pub fn density_dbfs(&self, k: usize) -> f64 {
        10.0 * self.density[k].max(1e-40).log10()
    }

    /// Integrated power over `lo <= f <= hi`, full-scale squared.
    pub fn band_power(&self, lo: f64, hi: f64) -> f64 {
        let len_fft = 2 * (self.density.len() - 1);
        match band_bin_range(len_fft, self.resolution * len_fft as f64, lo, hi) {
            Some((k_lo, k_hi)) => {
                self.density[k_lo..=k_hi].iter().sum::<f64>() * self.resolution
            }
            None => 0.0,
        }
    }

    /// Bin index with the highest density inside `lo <= f <= hi`.
    pub fn peak_bin(&self, lo: f64, hi: f64) -> Option<usize> {
        let len_fft = 2 * (self.density.len() - 1);
        let (k_lo, k_hi) = band_bin_range(len_fft, self.resolution * len_fft as f64, lo, hi)?;
        (k_lo..=k_hi).max_by(|&a, &b| self.density[a].total_cmp(&self.density[b]))
    }
}

/// Periodogram of `samples` (in full-scale units) with density
/// normalization: integrating the result over frequency returns the
/// mean-square value of the windowed signal.
pub fn psd(samples: &[f64], sample_rate: f64, window: PsdWindow) -> Result<PowerSpectrum> {
    let l = samples.len();
    if l < 16 {
        return Err(Error::Config(format!("PSD input too short: {l} samples")));
    }
    if !(sample_rate > 0.0) {
        return Err(Error::Config(format!("sample rate must be positive, got {sample_rate}")));
    }
    let mut buf: Vec<Complex<f64>>;
    let window_power: f64;
    match window {
        PsdWindow::Rectangular => {
            window_power = l as f64;
            buf = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
        }
        PsdWindow::Blackman => {
            let w = blackman_window(l);
            window_power = w.iter().map(|v| v * v).sum();
            buf = samples.iter().zip(&w).map(|(&v, &wv)| Complex::new(v * wv, 0.0)).collect();
        }
    }
    let fft = plan_forward(l);
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(&mut buf, &mut scratch);

    let half = l / 2;
    let norm = 1.0 / (sample_rate * window_power);
    let density = (0..=half)
        .map(|k| {
            let one_sided = if k == 0 || (l % 2 == 0 && k == half) { 1.0 } else { 2.0 };
            buf[k].norm_sqr() * norm * one_sided
        })
        .collect();
    Ok(PowerSpectrum { resolution: sample_rate / l as f64, density })
}
