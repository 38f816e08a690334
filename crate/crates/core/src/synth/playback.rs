//! The staged playback test waveform.
//!
//! The waveform drives a player at sample rate `f_P` with a tone at
//! exactly `f_P / 4`, laid out in five parts: silence, a raised-cosine
//! fade-in, a constant-amplitude main part, the fade-in reversed, and
//! silence again. Every fourth sample hits the positive carrier peak,
//! so the main part repeats the pattern `v_max, 0, -v_max, 0`.

use crate::buffer::SampleBuffer;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parameters of the staged playback waveform.
///
/// `main_start` is the 1-based position of the first main-part sample,
/// matching the generator formulas below; the fade-in occupies the
/// `fade_len` samples just before it, and the total length is
/// `2 * main_start + main_len`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaybackSpec {
    /// Player sample rate `f_P`, Hz. The tone sits at `f_P / 4`.
    pub sample_rate: f64,
    /// Player word length in bits.
    pub bit_depth: u32,
    /// 1-based position of the first main-part sample.
    pub main_start: usize,
    /// Fade length in samples.
    pub fade_len: usize,
    /// Main-part length in samples.
    pub main_len: usize,
    /// Fade starting amplitude in counts; nonzero so the player never
    /// mutes and the fade onset stays detectable.
    pub v_min: i32,
    /// Main-part amplitude in counts.
    pub v_max: i32,
}

impl Default for PlaybackSpec {
    fn default() -> Self {
        PlaybackSpec {
            sample_rate: 48_000.0,
            bit_depth: 24,
            main_start: 480_000,
            fade_len: 240_000,
            main_len: 1_440_000,
            v_min: 256,
            v_max: 8_388_607,
        }
    }
}

impl PlaybackSpec {
    fn validate(&self) -> Result<()> {
        if !(self.sample_rate > 0.0) {
            return Err(Error::Config(format!("player rate must be positive, got {}", self.sample_rate)));
        }
        if self.bit_depth != 16 && self.bit_depth != 24 {
            return Err(Error::Config(format!("player bit depth must be 16 or 24, got {}", self.bit_depth)));
        }
        let peak = (1i64 << (self.bit_depth - 1)) - 1;
        if self.v_max as i64 > peak || self.v_max <= 0 {
            return Err(Error::Config(format!(
                "main amplitude {} outside (0, {peak}] for {} bits",
                self.v_max, self.bit_depth
            )));
        }
        if self.v_min <= 0 || self.v_min > self.v_max {
            return Err(Error::Config(format!(
                "fade start amplitude {} outside (0, {}]",
                self.v_min, self.v_max
            )));
        }
        if self.fade_len == 0 || self.fade_len + 1 > self.main_start {
            return Err(Error::Config(format!(
                "fade of {} samples does not fit before main start {}",
                self.fade_len, self.main_start
            )));
        }
        if self.main_len == 0 {
            return Err(Error::Config("main part must not be empty".into()));
        }
        Ok(())
    }

    /// Total waveform length in samples.
    pub fn total_len(&self) -> usize {
        2 * self.main_start + self.main_len
    }
}

/// Carrier factor of sample `i` (1-based) relative to the main start:
/// exact values from the `f_P / 4` tone sampled on its peaks and
/// zeros, avoiding any floating-point fuzz at the zeros.
fn carrier(i: i64, main_start: i64) -> f64 {
    match (i - main_start).rem_euclid(4) {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    }
}

/// Generates the five-part playback waveform for `spec`.
///
/// Fade-in sample values follow
/// `{v_min + [1 + cos(pi (i - main_start) / fade_len)] (v_max - v_min) / 2} * carrier(i)`
/// rounded to the nearest count, the main part is `v_max * carrier(i)`
/// exactly, and the fade-out is the fade-in sequence reversed.
pub fn generate_playback_waveform(spec: &PlaybackSpec) -> Result<SampleBuffer> {
    spec.validate()?;
    let main_start = spec.main_start as i64;
    let fade_len = spec.fade_len as i64;
    let (v_min, v_max) = (spec.v_min as f64, spec.v_max as f64);

    let fade_in: Vec<i32> = (main_start - fade_len..main_start)
        .map(|i| {
            let lobe = (std::f64::consts::PI * (i - main_start) as f64 / fade_len as f64).cos();
            let envelope = v_min + (1.0 + lobe) * (v_max - v_min) / 2.0;
            (envelope * carrier(i, main_start)).round() as i32
        })
        .collect();

    let mut samples = Vec::with_capacity(spec.total_len());
    samples.resize(spec.main_start - spec.fade_len - 1, 0);
    samples.extend_from_slice(&fade_in);
    samples.extend((main_start..main_start + spec.main_len as i64).map(|i| {
        (v_max * carrier(i, main_start)) as i32
    }));
    samples.extend(fade_in.iter().rev());
    samples.resize(spec.total_len(), 0);

    SampleBuffer::new(samples, spec.sample_rate, spec.bit_depth, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_waveform_layout() {
        let spec = PlaybackSpec::default();
        let buf = generate_playback_waveform(&spec).unwrap();
        assert_eq!(buf.len(), 2_400_000);
        // 1-based positions converted to 0-based indices throughout.
        let first_fade = spec.main_start - spec.fade_len - 1;
        assert!(buf.samples[..first_fade].iter().all(|&v| v == 0), "leading silence");
        assert_eq!(buf.samples[first_fade], 256, "fade starts at v_min");
        let main0 = spec.main_start - 1;
        assert_eq!(&buf.samples[main0..main0 + 4], &[8_388_607, 0, -8_388_607, 0]);
        let last_main = main0 + spec.main_len - 1;
        assert_eq!(buf.samples[last_main], 0, "main length is a multiple of four");
        // The fade-out is the fade-in reversed, so it ends on v_min.
        let last_fade = last_main + spec.fade_len;
        assert_eq!(buf.samples[last_fade], 256);
        assert!(buf.samples[last_fade + 1..].iter().all(|&v| v == 0), "trailing silence");
    }

    #[test]
    fn fade_midpoint_sits_halfway_between_the_amplitudes() {
        let spec = PlaybackSpec::default();
        let buf = generate_playback_waveform(&spec).unwrap();
        // Sample main_start - fade_len/2 rides a carrier peak with the
        // envelope at v_min + (v_max - v_min) / 2 = 4194431.5 counts.
        let mid = spec.main_start - spec.fade_len / 2 - 1;
        assert_eq!(buf.samples[mid], 4_194_432);
    }

    #[test]
    fn fade_envelope_is_monotonic_on_carrier_peaks() {
        let spec = PlaybackSpec {
            main_start: 4_800,
            fade_len: 2_400,
            main_len: 9_600,
            ..PlaybackSpec::default()
        };
        let buf = generate_playback_waveform(&spec).unwrap();
        let mut last = 0;
        let mut i = spec.main_start - spec.fade_len - 1;
        while i < spec.main_start - 1 {
            // Every fourth sample from the fade start rides a peak.
            let v = buf.samples[i].abs();
            if v != 0 {
                assert!(v >= last, "envelope dips at {i}");
                last = v;
            }
            i += 4;
        }
    }

    #[test]
    fn spec_validation_catches_misfits() {
        let mut spec = PlaybackSpec::default();
        spec.v_max = 1 << 23;
        assert!(generate_playback_waveform(&spec).is_err());
        let mut spec = PlaybackSpec::default();
        spec.fade_len = spec.main_start;
        assert!(generate_playback_waveform(&spec).is_err());
        let mut spec = PlaybackSpec::default();
        spec.v_min = 0;
        assert!(generate_playback_waveform(&spec).is_err());
    }
}
