//! Signal-processing kernels shared by the analyses: tapered windows,
//! band-limited FFT interpolation, the analytic signal, and power
//! spectral densities.

mod psd;
mod spectrum;
mod window;

pub use psd::{psd, PowerSpectrum, PsdWindow};
pub use spectrum::{analytic_signal, band_filter, fft_interpolate};
pub use window::{blackman_edge_window, blackman_window};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parameters of one zero-crossing analysis pass.
///
/// An analysis looks at a span of `4 * block_len` samples (the region
/// where the edge window is exactly one) padded by `block_len` taper
/// samples on each side, so it consumes `6 * block_len` samples in
/// total. With the defaults at a 192 kHz recording rate the span is
/// exactly one second.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Edge-taper length N in samples; the analysis span is 4N samples.
    pub block_len: usize,
    /// Oversampling factor for the FFT interpolation, a power of two.
    pub n_over: usize,
    /// Half-width of the pass band around the carrier, Hz.
    pub bandwidth: f64,
    /// Nominal carrier frequency used to center the pass band, Hz.
    pub carrier_hint: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            block_len: 48_000,
            n_over: 64,
            bandwidth: 6_000.0,
            carrier_hint: 11_884.877,
        }
    }
}

impl AnalysisConfig {
    /// Total number of samples consumed by one analysis window.
    pub fn window_len(&self) -> usize {
        6 * self.block_len
    }

    /// Length of the flat analysis span in samples.
    pub fn span_len(&self) -> usize {
        4 * self.block_len
    }

    /// Duration T of the flat analysis span at the given rate, seconds.
    pub fn span_seconds(&self, sample_rate: f64) -> f64 {
        self.span_len() as f64 / sample_rate
    }

    /// Pass band `[carrier_hint - bandwidth, carrier_hint + bandwidth]`.
    pub fn band(&self) -> (f64, f64) {
        (self.carrier_hint - self.bandwidth, self.carrier_hint + self.bandwidth)
    }

    /// Checks the invariants against a concrete sampling rate.
    pub fn validate(&self, sample_rate: f64) -> Result<()> {
        if self.block_len < 16 {
            return Err(Error::Config(format!("block length {} is too short", self.block_len)));
        }
        if self.n_over < 2 || !self.n_over.is_power_of_two() {
            return Err(Error::Config(format!(
                "oversampling factor must be a power of two >= 2, got {}",
                self.n_over
            )));
        }
        let (lo, hi) = self.band();
        if !(lo > 0.0) {
            return Err(Error::Config(format!(
                "pass band must exclude DC: carrier {} Hz, bandwidth {} Hz",
                self.carrier_hint, self.bandwidth
            )));
        }
        if hi >= sample_rate / 2.0 {
            return Err(Error::Config(format!(
                "pass band upper edge {hi} Hz reaches the Nyquist limit of a {sample_rate} Hz recording"
            )));
        }
        Ok(())
    }
}
