//! Comparison analyses: frequency-domain band-power accounting and
//! Hilbert-transform jitter extraction.
//!
//! Both are classical ways to look at the same recordings the
//! zero-crossing analysis targets, and both have a blind spot the
//! crossing method does not: band powers cannot tell sampling jitter
//! from amplitude modulation, and instantaneous phase cannot see
//! phase-incoherent additive noise at its full strength.

use serde::Serialize;

use crate::buffer::SampleBuffer;
use crate::dsp::{
    analytic_signal, band_filter, blackman_edge_window, psd, AnalysisConfig, PsdWindow,
};
use crate::error::{Error, Result};
use crate::zca::fit_crossing_grid;

/// How many frequency bins on each side of the carrier peak belong to
/// the carrier: the window's main lobe fits inside, with under a
/// thousandth of a dB of the tone's power outside.
const CARRIER_BINS: usize = 2;

/// Guard half-width, in bins, around the carrier peak excluded from
/// the noise-band sum. The window's sidelobe skirt falls below the
/// noise floors of interest beyond roughly 130 bins; 192 leaves
/// margin.
const GUARD_BINS: usize = 192;

/// Low-frequency bins excluded everywhere: quantization bias and
/// window leakage concentrate at DC.
const DC_BINS: usize = 4;

/// Band-power accounting of one recording.
#[derive(Debug, Clone, Serialize)]
pub struct BandPowerReport {
    /// The requested noise band, Hz.
    pub band: (f64, f64),
    /// Frequency of the strongest in-band peak, Hz.
    pub carrier_frequency: f64,
    /// Power integrated over the carrier peak, full-scale units
    /// squared.
    pub carrier_power: f64,
    /// Power integrated over the band with the carrier guard
    /// excluded, rescaled to the full band width. Full-scale units
    /// squared.
    pub noise_band_power: f64,
    /// Power everywhere outside the band (DC region excluded).
    pub floor_power: f64,
    /// Mean square of the recording, computed in the time domain.
    pub total_power: f64,
    /// Frequency resolution of the underlying spectrum, Hz.
    pub resolution: f64,
    /// `10 log10(noise_band_power / carrier_power)`.
    pub noise_carrier_db: f64,
}

impl BandPowerReport {
    /// Noise band power in decibels relative to full scale squared.
    pub fn noise_band_dbfs(&self) -> f64 {
        10.0 * self.noise_band_power.max(1e-40).log10()
    }

    /// Carrier power in decibels relative to full scale squared.
    pub fn carrier_dbfs(&self) -> f64 {
        10.0 * self.carrier_power.max(1e-40).log10()
    }

    /// How far the spectral accounting is from the time-domain mean
    /// square, decibels.
    pub fn conservation_error_db(&self) -> f64 {
        let accounted = self.carrier_power + self.noise_band_power + self.floor_power;
        10.0 * (accounted / self.total_power).log10()
    }
}

/// Integrates the power spectrum of a recording into carrier, in-band
/// noise, and out-of-band floor.
///
/// The noise sum runs directly over noise bins rather than taking a
/// difference of near-equal totals, which would lose the small value
/// to cancellation.
pub fn fda_band_power(buffer: &SampleBuffer, band: (f64, f64)) -> Result<BandPowerReport> {
    let nyquist = buffer.sample_rate / 2.0;
    if !(band.0 >= 0.0 && band.0 < band.1 && band.1 <= nyquist) {
        return Err(Error::Config(format!(
            "band {:?} Hz must sit inside [0, {nyquist}] Hz",
            band
        )));
    }
    let x = buffer.to_normalized();
    let total_power = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    let spectrum = psd(&x, buffer.sample_rate, PsdWindow::Blackman)?;
    drop(x);
    let df = spectrum.resolution;
    let bins = spectrum.density.len();

    let peak = spectrum
        .peak_bin(band.0, band.1)
        .ok_or_else(|| Error::Config(format!("band {band:?} Hz holds no spectrum bins")))?;
    let carrier_frequency = spectrum.frequency(peak);

    let sum_bins = |lo: usize, hi: usize| -> f64 {
        if lo > hi {
            return 0.0;
        }
        spectrum.density[lo..=hi.min(bins - 1)].iter().sum::<f64>() * df
    };

    let carrier_power = sum_bins(peak.saturating_sub(CARRIER_BINS), peak + CARRIER_BINS);

    let band_lo = (band.0 / df).ceil() as usize;
    let band_hi = ((band.1 / df).floor() as usize).min(bins - 1);
    let guard_lo = peak.saturating_sub(GUARD_BINS).max(band_lo);
    let guard_hi = (peak + GUARD_BINS).min(band_hi);
    let band_bins = band_hi + 1 - band_lo;
    let kept_bins = band_bins - (guard_hi + 1 - guard_lo);
    if kept_bins == 0 {
        return Err(Error::Config(format!(
            "band {band:?} Hz is swallowed by the carrier guard of {GUARD_BINS} bins at {df} Hz \
             resolution; use a longer record"
        )));
    }
    let below = if guard_lo > band_lo { sum_bins(band_lo, guard_lo - 1) } else { 0.0 };
    let raw = below + sum_bins(guard_hi + 1, band_hi);
    let noise_band_power = raw * band_bins as f64 / kept_bins as f64;

    let floor_power =
        sum_bins(DC_BINS, band_lo.saturating_sub(1)) + sum_bins(band_hi + 1, bins - 1);

    Ok(BandPowerReport {
        band,
        carrier_frequency,
        carrier_power,
        noise_band_power,
        floor_power,
        total_power,
        resolution: df,
        noise_carrier_db: 10.0 * (noise_band_power / carrier_power).log10(),
    })
}

/// Jitter trace extracted from instantaneous phase.
#[derive(Debug, Clone, Serialize)]
pub struct HtaResult {
    /// Time of `jitter[0]` in the recording's clock, seconds.
    pub start_time: f64,
    /// Sample rate of the jitter trace, Hz.
    pub sample_rate: f64,
    /// Carrier frequency from the linear phase fit, Hz.
    pub carrier_estimate: f64,
    /// Jitter estimate per span sample, seconds.
    pub jitter: Vec<f64>,
    /// Smallest analytic-signal envelope over the span, full scale.
    pub min_envelope: f64,
    /// Mean envelope over the span, full scale.
    pub mean_envelope: f64,
    /// Set when the envelope approached zero, where unwrapped phase
    /// stops being trustworthy.
    pub quality_warning: bool,
}

impl HtaResult {
    /// Time of `jitter[k]` in the recording's clock, seconds.
    pub fn time_of(&self, k: usize) -> f64 {
        self.start_time + k as f64 / self.sample_rate
    }

    /// Mean-removed RMS of the jitter trace, seconds.
    pub fn rms(&self) -> f64 {
        crate::zca::deviation(&self.jitter)
    }
}

/// Extracts a jitter estimate from the instantaneous phase of the
/// band-limited analytic signal, one value per recorder sample over
/// the same span the crossing analysis uses.
pub fn hta_extract(buffer: &SampleBuffer, cfg: &AnalysisConfig) -> Result<HtaResult> {
    cfg.validate(buffer.sample_rate)?;
    let n = cfg.block_len;
    let n6 = cfg.window_len();
    if buffer.len() < n6 {
        return Err(Error::Coverage(format!(
            "analysis window needs {n6} samples, recording has {}",
            buffer.len()
        )));
    }
    let fs = buffer.full_scale();
    let window = blackman_edge_window(n);
    let windowed: Vec<f64> =
        buffer.samples[..n6].iter().zip(&window).map(|(&v, w)| v as f64 / fs * w).collect();
    let filtered = band_filter(&windowed, buffer.sample_rate, cfg.band())?;
    drop(windowed);
    let z = analytic_signal(&filtered)?;
    drop(filtered);

    // Unwrap the phase over the span, where the edge window is one.
    let span = &z[n..=5 * n];
    let mut phase = Vec::with_capacity(span.len());
    let mut envelope_min = f64::INFINITY;
    let mut envelope_sum = 0.0;
    let mut prev = span[0].arg();
    let mut offset = 0.0;
    for v in span {
        let raw = v.arg();
        let step = raw - prev;
        if step > std::f64::consts::PI {
            offset -= std::f64::consts::TAU;
        } else if step < -std::f64::consts::PI {
            offset += std::f64::consts::TAU;
        }
        prev = raw;
        phase.push(raw + offset);
        let env = v.norm();
        envelope_min = envelope_min.min(env);
        envelope_sum += env;
    }
    let mean_envelope = envelope_sum / span.len() as f64;

    // The same uniform-abscissa least squares the crossing grid uses:
    // "half_period" is the phase step per sample, "first" the phase
    // at the span start.
    let fit = fit_crossing_grid(&phase)?;
    let omega = fit.half_period * buffer.sample_rate;
    let jitter: Vec<f64> = phase
        .iter()
        .enumerate()
        .map(|(i, &p)| (p - (fit.first + i as f64 * fit.half_period)) / omega)
        .collect();

    Ok(HtaResult {
        start_time: buffer.time_of(n),
        sample_rate: buffer.sample_rate,
        carrier_estimate: omega / std::f64::consts::TAU,
        jitter,
        min_envelope: envelope_min,
        mean_envelope,
        quality_warning: envelope_min < 0.2 * mean_envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::correlation;
    use crate::synth::{make_bandlimited_noise, synthesize_dummy, DummySpec};
    use crate::zca::deviation;

    const TAU: f64 = std::f64::consts::TAU;

    fn tone_buffer(amp: f64, f0: f64, seconds: f64) -> SampleBuffer {
        let rate = 192_000.0;
        let n = (seconds * rate) as usize;
        let samples: Vec<i32> = (0..n)
            .map(|i| (8_388_607.0 * amp * (TAU * f0 * i as f64 / rate + 0.3).cos()).floor() as i32)
            .collect();
        SampleBuffer::new(samples, rate, 24, 0.0).unwrap()
    }

    #[test]
    fn carrier_power_of_an_off_bin_tone_is_exact_to_a_fifth_of_a_decibel() {
        // Half-bin offset is the worst case for peak integration.
        let buf = tone_buffer(0.9, 11_884.877, 0.5);
        let report = fda_band_power(&buf, (6_000.0, 18_000.0)).unwrap();
        let truth = 0.9f64 * 0.9 / 2.0;
        let err_db = 10.0 * (report.carrier_power / truth).log10();
        assert!(err_db.abs() < 0.2, "carrier error {err_db} dB");
        assert!((report.carrier_frequency - 11_884.877).abs() < 2.0 * report.resolution);
        assert!(report.conservation_error_db().abs() < 0.2);
        // A clean quantized tone leaves only a quantization floor.
        assert!(report.noise_band_power < 1e-12, "noise {}", report.noise_band_power);
    }

    #[test]
    fn band_noise_power_matches_the_injected_variance() {
        let rate = 192_000.0;
        let n = 96_000;
        let band = (6_000.0, 18_000.0);
        let noise = make_bandlimited_noise(n, rate, 1e-3, band, 9).unwrap();
        let injected = noise.iter().map(|v| v * v).sum::<f64>() / n as f64;
        let samples: Vec<i32> = noise
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let tone = 0.9 * (TAU * 11_884.877 * i as f64 / rate).cos();
                (8_388_607.0 * (tone + v)).floor() as i32
            })
            .collect();
        let buf = SampleBuffer::new(samples, rate, 24, 0.0).unwrap();
        let report = fda_band_power(&buf, band).unwrap();
        let err_db = 10.0 * (report.noise_band_power / injected).log10();
        assert!(err_db.abs() < 0.3, "band noise off by {err_db} dB");
        assert!(report.conservation_error_db().abs() < 0.2);
        assert!(report.noise_carrier_db < 0.0);
    }

    #[test]
    fn floor_collects_the_out_of_band_power() {
        let rate = 192_000.0;
        let n = 96_000;
        // One in-band carrier plus one out-of-band tone.
        let samples: Vec<i32> = (0..n)
            .map(|i| {
                let t = i as f64 / rate;
                let v = 0.5 * (TAU * 11_884.877 * t).cos() + 0.1 * (TAU * 40_000.0 * t).cos();
                (8_388_607.0 * v).floor() as i32
            })
            .collect();
        let buf = SampleBuffer::new(samples, rate, 24, 0.0).unwrap();
        let report = fda_band_power(&buf, (6_000.0, 18_000.0)).unwrap();
        let outside = 0.1f64 * 0.1 / 2.0;
        assert!((report.floor_power / outside - 1.0).abs() < 0.05, "floor {}", report.floor_power);
    }

    #[test]
    fn invalid_bands_are_rejected() {
        let buf = tone_buffer(0.5, 11_884.877, 0.05);
        assert_eq!(
            fda_band_power(&buf, (6_000.0, 200_000.0)).unwrap_err().category(),
            "config"
        );
        assert_eq!(fda_band_power(&buf, (18_000.0, 6_000.0)).unwrap_err().category(), "config");
        // A short record's guard swallows a narrow band entirely.
        assert_eq!(
            fda_band_power(&buf, (11_000.0, 12_500.0)).unwrap_err().category(),
            "config"
        );
    }

    fn short_spec() -> (DummySpec, AnalysisConfig) {
        (
            DummySpec { duration: 0.4, ..DummySpec::default() },
            AnalysisConfig { block_len: 12_000, ..AnalysisConfig::default() },
        )
    }

    #[test]
    fn clean_tone_leaves_picosecond_scale_phase_residual() {
        let (spec, cfg) = short_spec();
        let out = synthesize_dummy(&spec).unwrap();
        let hta = hta_extract(&out.buffer, &cfg).unwrap();
        assert_eq!(hta.jitter.len(), 4 * cfg.block_len + 1);
        assert!(hta.rms() < 0.5e-12, "clean-tone residual {} s", hta.rms());
        assert!((hta.carrier_estimate - spec.carrier).abs() < 0.01);
        assert!(!hta.quality_warning);
        assert!((hta.mean_envelope - 0.9).abs() < 1e-3);
    }

    #[test]
    fn injected_jitter_is_recovered_sample_by_sample() {
        let (mut spec, cfg) = short_spec();
        spec.jitter_on = true;
        let out = synthesize_dummy(&spec).unwrap();
        let hta = hta_extract(&out.buffer, &cfg).unwrap();
        let n = cfg.block_len;
        let truth = &out.traces.j[n..=5 * n];
        let corr = correlation(&hta.jitter, truth);
        assert!(corr >= 0.99, "correlation {corr}");
        let ratio = hta.rms() / deviation(truth);
        assert!((ratio - 1.0).abs() < 0.1, "RMS ratio {ratio}");
    }

    #[test]
    fn amplitude_modulation_is_rejected() {
        let (mut spec, cfg) = short_spec();
        spec.am_on = true;
        let out = synthesize_dummy(&spec).unwrap();
        let hta = hta_extract(&out.buffer, &cfg).unwrap();
        assert!(hta.rms() <= 5e-12, "AM leaked {} s into the phase", hta.rms());
    }

    #[test]
    fn envelope_collapse_raises_the_quality_warning() {
        let rate = 192_000.0;
        let n6 = 72_000;
        // Tone whose envelope dives to nearly zero mid-span.
        let samples: Vec<i32> = (0..n6)
            .map(|i| {
                let t = i as f64 / rate;
                let dip = 1.0 - 0.999 * (-((t - 0.1875) / 0.01).powi(2)).exp();
                (8_388_607.0 * 0.9 * dip * (TAU * 11_884.877 * t).cos()).floor() as i32
            })
            .collect();
        let buf = SampleBuffer::new(samples, rate, 24, 0.0).unwrap();
        let cfg = AnalysisConfig { block_len: 12_000, ..AnalysisConfig::default() };
        let hta = hta_extract(&buf, &cfg).unwrap();
        assert!(hta.quality_warning, "envelope min {} of {}", hta.min_envelope, hta.mean_envelope);
    }

    #[test]
    fn short_recordings_are_rejected() {
        let buf = tone_buffer(0.5, 11_884.877, 0.05);
        let cfg = AnalysisConfig { block_len: 48_000, ..AnalysisConfig::default() };
        assert_eq!(hta_extract(&buf, &cfg).unwrap_err().category(), "coverage");
    }
}
