//! TOML configuration for the simulate subcommands.
//!
//! Configuration files quote noise levels in picoseconds of realized,
//! in-band RMS, the unit the reports use; the synthesis library takes
//! white-input levels in seconds, so each section converts by the
//! square root of its kept bandwidth fraction before building a spec.

use std::path::Path;

use serde::{Deserialize, Serialize};
use zca_core::synth::{DummySpec, PlaybackSpec, RecorderSpec};

use crate::error::{CliError, Result};

/// One picosecond in seconds.
pub const PS: f64 = 1e-12;

/// Reads a TOML file into one of the configuration types.
pub fn load_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|err| CliError::Config(format!("{}: {err}", path.display())))
}

/// White-input level that realizes `target` RMS after keeping only
/// `kept_hz` of bandwidth out of the full band up to `rate / 2`.
fn white_level(target: f64, rate: f64, kept_hz: f64) -> Result<f64> {
    if !(kept_hz > 0.0) || !(rate > 0.0) || kept_hz >= rate / 2.0 {
        return Err(CliError::Config(format!(
            "noise band of {kept_hz} Hz does not fit under the Nyquist frequency of a {rate} Hz recording"
        )));
    }
    Ok(target * (rate / 2.0 / kept_hz).sqrt())
}

/// Settings for `simulate dummy`: one tone with selectable noise kinds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DummyConfig {
    /// Tone frequency, Hz.
    pub carrier_hz: f64,
    /// Tone amplitude as a fraction of full scale.
    pub amplitude_ratio: f64,
    /// Tone phase at time zero, radians.
    pub theta0_rad: f64,
    /// In-band sampling-jitter RMS, ps. The additive carrier-band noise
    /// reuses this white level, which makes its equivalent-time RMS
    /// larger by the square root of two because its band is twice as wide.
    pub jitter_ps: f64,
    /// Noise bandwidth: jitter occupies `(0, bandwidth_hz)`, additive
    /// noise the band `carrier_hz` plus or minus `bandwidth_hz`.
    pub bandwidth_hz: f64,
    /// Recording sample rate, Hz.
    pub sample_rate_hz: f64,
    /// Word length, 16 or 24 bits.
    pub bit_depth: u32,
    /// Recording length, seconds.
    pub duration_s: f64,
    /// Noise seed.
    pub seed: u64,
    /// Inject sampling jitter.
    pub jitter: bool,
    /// Inject amplitude modulation.
    pub am: bool,
    /// Inject additive noise in the carrier band.
    pub pi: bool,
    /// Inject recorder-side additive noise.
    pub recorder_noise: bool,
    /// Recorder-side noise as equivalent-time RMS, ps.
    pub recorder_noise_ps: f64,
}

impl Default for DummyConfig {
    fn default() -> Self {
        DummyConfig {
            carrier_hz: 11_884.877,
            amplitude_ratio: 0.9,
            theta0_rad: 0.0,
            jitter_ps: 40.0,
            bandwidth_hz: 6_000.0,
            sample_rate_hz: 192_000.0,
            bit_depth: 24,
            duration_s: 1.6,
            seed: 1,
            jitter: false,
            am: false,
            pi: false,
            recorder_noise: false,
            recorder_noise_ps: 40.0 * std::f64::consts::SQRT_2,
        }
    }
}

impl DummyConfig {
    /// Converts to the synthesis spec, mapping in-band ps levels to
    /// white-input levels in seconds.
    pub fn to_spec(&self) -> Result<DummySpec> {
        let lp = white_level(1.0, self.sample_rate_hz, self.bandwidth_hz)?;
        let bp = white_level(1.0, self.sample_rate_hz, 2.0 * self.bandwidth_hz)?;
        Ok(DummySpec {
            carrier: self.carrier_hz,
            amplitude_ratio: self.amplitude_ratio,
            theta0: self.theta0_rad,
            jitter_rms: self.jitter_ps * PS * lp,
            bandwidth: self.bandwidth_hz,
            sample_rate: self.sample_rate_hz,
            bit_depth: self.bit_depth,
            duration: self.duration_s,
            seed: self.seed,
            jitter_on: self.jitter,
            am_on: self.am,
            pi_on: self.pi,
            recorder_noise_on: self.recorder_noise,
            recorder_noise_rms: self.recorder_noise_ps * PS * bp,
        })
    }
}

/// Playback waveform structure shared by the session simulations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlaybackConfig {
    /// Player sample rate, Hz; the tone sits at a quarter of it.
    pub sample_rate_hz: f64,
    /// Word length, 16 or 24 bits.
    pub bit_depth: u32,
    /// One-based sample where the full-amplitude part starts.
    pub main_start: usize,
    /// Fade-in length, samples.
    pub fade_len: usize,
    /// Full-amplitude length, samples.
    pub main_len: usize,
    /// Peak code of the faint structural tone in the silent parts.
    pub v_min: i32,
    /// Peak code of the full-amplitude tone.
    pub v_max: i32,
}

impl Default for PlaybackConfig {
    fn default() -> Self {
        PlaybackConfig {
            sample_rate_hz: 48_000.0,
            bit_depth: 24,
            main_start: 144_000,
            fade_len: 48_000,
            main_len: 696_000,
            v_min: 256,
            v_max: 8_388_607,
        }
    }
}

impl PlaybackConfig {
    pub fn to_spec(&self) -> PlaybackSpec {
        PlaybackSpec {
            sample_rate: self.sample_rate_hz,
            bit_depth: self.bit_depth,
            main_start: self.main_start,
            fade_len: self.fade_len,
            main_len: self.main_len,
            v_min: self.v_min,
            v_max: self.v_max,
        }
    }

    /// The played tone frequency, a quarter of the player rate.
    pub fn carrier_hz(&self) -> f64 {
        self.sample_rate_hz / 4.0
    }
}

/// Player noise injected into every recording of a session.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlayerConfig {
    /// Player sampling-jitter RMS, ps, realized in `(0, jitter_band_hz)`.
    pub jitter_ps: f64,
    /// Upper edge of the jitter band, Hz.
    pub jitter_band_hz: f64,
    /// Player additive noise as equivalent-time RMS, ps, realized in
    /// the carrier-centered band used by the analysis.
    pub pi_ps: f64,
}

impl Default for PlayerConfig {
    fn default() -> Self {
        PlayerConfig { jitter_ps: 20.0, jitter_band_hz: 3_000.0, pi_ps: 40.0 }
    }
}

impl PlayerConfig {
    /// Nominal player deviation: jitter and additive noise in quadrature.
    pub fn sigma_n2_ps(&self) -> f64 {
        (self.jitter_ps * self.jitter_ps + self.pi_ps * self.pi_ps).sqrt()
    }
}

/// The two recorders of a double-recorder session.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecordersConfig {
    /// Recorder sample rate, Hz.
    pub sample_rate_hz: f64,
    /// Word length, 16 or 24 bits.
    pub bit_depth: u32,
    /// Recorder input gain applied to the played waveform.
    pub gain: f64,
    /// Length of each recording, seconds.
    pub duration_s: f64,
    /// Start of recorder A on the playback clock, seconds.
    pub offset_a_s: f64,
    /// Start of recorder B on the playback clock, seconds; a value that
    /// is not a whole number of sample periods exercises the alignment.
    pub offset_b_s: f64,
    /// Recorder A additive noise as equivalent-time RMS, ps.
    pub noise_a_ps: f64,
    /// Recorder B additive noise as equivalent-time RMS, ps.
    pub noise_b_ps: f64,
}

impl Default for RecordersConfig {
    fn default() -> Self {
        RecordersConfig {
            sample_rate_hz: 192_000.0,
            bit_depth: 24,
            gain: 0.9,
            duration_s: 14.0,
            offset_a_s: 0.0,
            offset_b_s: 0.246_801_357_9,
            noise_a_ps: 35.0,
            noise_b_ps: 35.0,
        }
    }
}

impl RecordersConfig {
    pub fn to_spec(&self, offset: f64) -> RecorderSpec {
        RecorderSpec {
            start_time: offset,
            sample_rate: self.sample_rate_hz,
            bit_depth: self.bit_depth,
            gain: self.gain,
            duration: self.duration_s,
        }
    }
}

/// Settings for `simulate drs`: one playback, two recorders.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrsConfig {
    /// Noise seed for the whole session.
    pub seed: Option<u64>,
    /// Bundle the player's two output channels: their additive noise
    /// averages down while the shared sampling jitter stays whole.
    pub bundled: bool,
    /// Half-width of the carrier-centered band every additive noise
    /// source occupies, Hz; match the analysis bandwidth.
    pub noise_band_half_hz: f64,
    pub playback: PlaybackConfig,
    pub player: PlayerConfig,
    pub recorders: RecordersConfig,
}

impl Default for DrsConfig {
    fn default() -> Self {
        DrsConfig {
            seed: None,
            bundled: false,
            noise_band_half_hz: 6_000.0,
            playback: PlaybackConfig::default(),
            player: PlayerConfig::default(),
            recorders: RecordersConfig::default(),
        }
    }
}

impl DrsConfig {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(2026)
    }
}

/// The stereo recorder of a channel-split session.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StereoRecorderConfig {
    /// Recorder sample rate, Hz.
    pub sample_rate_hz: f64,
    /// Word length, 16 or 24 bits.
    pub bit_depth: u32,
    /// Recorder input gain applied to the played waveform.
    pub gain: f64,
    /// Recording length, seconds.
    pub duration_s: f64,
    /// Start on the playback clock, seconds.
    pub start_s: f64,
    /// Sampling jitter of the shared conversion clock, ps, common to
    /// both channels and realized in the player's jitter band.
    pub clock_jitter_ps: f64,
    /// Left-channel additive noise as equivalent-time RMS, ps.
    pub noise_l_ps: f64,
    /// Right-channel additive noise as equivalent-time RMS, ps.
    pub noise_r_ps: f64,
}

impl Default for StereoRecorderConfig {
    fn default() -> Self {
        StereoRecorderConfig {
            sample_rate_hz: 192_000.0,
            bit_depth: 24,
            gain: 0.9,
            duration_s: 8.0,
            start_s: 0.0,
            clock_jitter_ps: 16.0,
            noise_l_ps: 44.0,
            noise_r_ps: 43.0,
        }
    }
}

impl StereoRecorderConfig {
    pub fn to_spec(&self) -> RecorderSpec {
        RecorderSpec {
            start_time: self.start_s,
            sample_rate: self.sample_rate_hz,
            bit_depth: self.bit_depth,
            gain: self.gain,
            duration: self.duration_s,
        }
    }
}

/// Settings for `simulate stereo`: one playback, one two-channel
/// recorder whose channels share a sampling clock.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StereoConfig {
    /// Noise seed for the whole session.
    pub seed: Option<u64>,
    /// Half-width of the carrier-centered band every additive noise
    /// source occupies, Hz; match the analysis bandwidth.
    pub noise_band_half_hz: f64,
    pub playback: PlaybackConfig,
    pub player: PlayerConfig,
    pub recorder: StereoRecorderConfig,
}

impl Default for StereoConfig {
    fn default() -> Self {
        StereoConfig {
            seed: None,
            noise_band_half_hz: 6_000.0,
            playback: PlaybackConfig {
                main_len: 408_000,
                ..PlaybackConfig::default()
            },
            player: PlayerConfig::default(),
            recorder: StereoRecorderConfig::default(),
        }
    }
}

impl StereoConfig {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(7)
    }
}

/// White-input level for a low-pass band `(0, band_hz)`.
pub fn lowpass_white(target: f64, rate: f64, band_hz: f64) -> Result<f64> {
    white_level(target, rate, band_hz)
}

/// White-input level for a carrier-centered band of half-width `half_hz`.
pub fn bandpass_white(target: f64, rate: f64, half_hz: f64) -> Result<f64> {
    white_level(target, rate, 2.0 * half_hz)
}
