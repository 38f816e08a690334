//! Helpers shared by the measurement subcommands: flag resolution,
//! channel selection, and window anchoring.

use std::path::Path;

use zca_core::dsp::AnalysisConfig;
use zca_core::wav::{read_wav, WavFile};
use zca_core::zca::{compute_zcf_at, detect_onset, window_starts, ZeroCrossingSeries};
use zca_core::{Error, SampleBuffer};

use crate::args::{AnalysisFlags, ChannelFlags};
use crate::error::{CliError, Result};
use crate::manifest::AnalysisSettings;

/// Builds the analysis configuration from the shared flags and the
/// recording's sample rate, then validates it.
pub fn resolve_config(flags: &AnalysisFlags, sample_rate: f64) -> Result<AnalysisConfig> {
    let mut cfg = AnalysisConfig::default();
    if let Some(seconds) = flags.window_seconds {
        if !(seconds > 0.0) {
            return Err(CliError::Config(format!(
                "window length must be positive, got {seconds} s"
            )));
        }
        cfg.block_len = (seconds * sample_rate / 4.0).round() as usize;
    }
    if let Some(n) = flags.oversample {
        cfg.n_over = n;
    }
    if let Some(bw) = flags.bandwidth_hz {
        cfg.bandwidth = bw;
    }
    if let Some(fc) = flags.carrier_hz {
        cfg.carrier_hint = fc;
    }
    cfg.validate(sample_rate)?;
    Ok(cfg)
}

/// Reads a WAV file and selects the analysis channel. Returns the
/// parsed file, the selected buffer, and a label naming the selection.
pub fn load_buffer(path: &Path, flags: &ChannelFlags) -> Result<(WavFile, SampleBuffer, String)> {
    let wav = read_wav(path)?;
    let (buffer, label) = if flags.pseudo_mono {
        (wav.pseudo_mono_buffer(0.0)?, "pseudo-mono".to_string())
    } else {
        (wav.channel_buffer(flags.channel, 0.0)?, flags.channel.to_string())
    };
    Ok((wav, buffer, label))
}

/// Where the analysis windows anchor in one recording.
pub struct Anchor {
    /// Sample index where the first analyzed span begins.
    pub first_span: usize,
    /// Tone onset time on the recording's own clock.
    pub onset_time: f64,
}

/// Finds the tone onset and anchors the first analysis span: right at
/// the start when the recording is loud from its first samples,
/// otherwise 0.8 span lengths past the onset so the fade-in and the
/// settling stay out of the measurement.
pub fn anchor_windows(buffer: &SampleBuffer, cfg: &AnalysisConfig) -> Result<Anchor> {
    let onset = detect_onset(buffer, cfg)
        .ok_or_else(|| Error::Coverage("no tone onset found in the recording".into()))?;
    let w = (4.0 * buffer.sample_rate / cfg.carrier_hint).round() as usize;
    let first_span = if onset <= 2 * w {
        cfg.block_len
    } else {
        onset + (0.8 * cfg.span_len() as f64) as usize
    };
    Ok(Anchor { first_span, onset_time: buffer.time_of(onset) })
}

/// Number of whole analysis windows that fit behind the anchor.
pub fn windows_that_fit(buffer_len: usize, cfg: &AnalysisConfig, first_span: usize) -> usize {
    let start0 = first_span.saturating_sub(cfg.block_len);
    if buffer_len < start0 + cfg.window_len() {
        return 0;
    }
    (buffer_len - start0 - cfg.window_len()) / cfg.span_len() + 1
}

/// Resolves the analyzed window count from the request and the room.
pub fn resolve_windows(requested: Option<usize>, available: usize) -> Result<usize> {
    if available == 0 {
        return Err(Error::Coverage(
            "recording is too short for even one analysis window".into(),
        )
        .into());
    }
    match requested {
        None => Ok(available),
        Some(0) => Err(CliError::Config("window count must be at least one".into())),
        Some(n) if n <= available => Ok(n),
        Some(n) => {
            Err(Error::Coverage(format!("requested {n} windows, only {available} fit")).into())
        }
    }
}

/// Runs the zero-crossing engine on `count` consecutive windows.
pub fn analyze_windows(
    buffer: &SampleBuffer,
    cfg: &AnalysisConfig,
    first_span: usize,
    count: usize,
) -> Result<Vec<ZeroCrossingSeries>> {
    let starts = window_starts(buffer.len(), cfg, first_span, count)?;
    starts
        .iter()
        .map(|&start| compute_zcf_at(buffer, cfg, start).map_err(CliError::from))
        .collect()
}

/// Resolved analysis settings for the run manifest.
pub fn settings(
    cfg: &AnalysisConfig,
    sample_rate: f64,
    windows: usize,
    channel: &str,
) -> AnalysisSettings {
    AnalysisSettings {
        window_seconds: cfg.span_seconds(sample_rate),
        block_len: cfg.block_len,
        oversample: cfg.n_over,
        bandwidth_hz: cfg.bandwidth,
        carrier_hz: cfg.carrier_hint,
        windows,
        channel: channel.to_string(),
    }
}

/// A sample rate that must be a whole number of Hz to go into a WAV
/// header.
pub fn integral_rate(rate: f64) -> Result<u32> {
    if rate <= 0.0 || rate.fract() != 0.0 || rate > u32::MAX as f64 {
        return Err(CliError::Config(format!(
            "WAV files need a whole-number sample rate, got {rate} Hz"
        )));
    }
    Ok(rate as u32)
}

/// Root-mean-square of a slice, without mean removal; the grid fit has
/// already taken the mean out of each window's fluctuations.
pub fn pooled_rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::AnalysisFlags;

    fn no_flags() -> AnalysisFlags {
        AnalysisFlags {
            window_seconds: None,
            oversample: None,
            bandwidth_hz: None,
            carrier_hz: None,
        }
    }

    #[test]
    fn window_seconds_sets_the_block_length() {
        let mut flags = no_flags();
        flags.window_seconds = Some(0.5);
        let cfg = resolve_config(&flags, 192_000.0).unwrap();
        assert_eq!(cfg.block_len, 24_000);
        assert_eq!(cfg.n_over, 64);
    }

    #[test]
    fn invalid_oversampling_is_rejected() {
        let mut flags = no_flags();
        flags.oversample = Some(3);
        let err = resolve_config(&flags, 192_000.0).unwrap_err();
        assert_eq!(err.category(), "config");
    }

    #[test]
    fn window_budget_matches_the_start_arithmetic() {
        let cfg = zca_core::dsp::AnalysisConfig::default();
        // A dummy-sized recording fits exactly one window when anchored
        // at the default first span.
        let len = (1.6 * 192_000.0) as usize;
        assert_eq!(windows_that_fit(len, &cfg, cfg.block_len), 1);
        // Ten windows need first - N + 10 spans + 2N of taper.
        let first = 200_000;
        let need = first - cfg.block_len + 10 * cfg.span_len() + 2 * cfg.block_len;
        assert_eq!(windows_that_fit(need, &cfg, first), 10);
        assert_eq!(windows_that_fit(need - 1, &cfg, first), 9);
    }

    #[test]
    fn requested_windows_must_fit() {
        assert_eq!(resolve_windows(None, 3).unwrap(), 3);
        assert_eq!(resolve_windows(Some(2), 3).unwrap(), 2);
        assert_eq!(resolve_windows(Some(4), 3).unwrap_err().category(), "coverage");
        assert_eq!(resolve_windows(None, 0).unwrap_err().category(), "coverage");
    }

    #[test]
    fn fractional_rates_cannot_go_into_wav_headers() {
        assert_eq!(integral_rate(192_000.0).unwrap(), 192_000);
        assert!(integral_rate(44_100.5).is_err());
    }
}
