//! Simulated capture of the playback waveform by a recorder.
//!
//! The player's reconstruction low-pass strips everything above the
//! tone frequency, so the analog signal entering the recorder is
//! modeled analytically: the five-part amplitude envelope times a pure
//! `f_P / 4` carrier, plus the injected noise terms. The recorder then
//! samples this on its own clock and floor-quantizes.

use crate::buffer::{NoiseTraces, SampleBuffer};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One recorder's sampling clock and input chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecorderSpec {
    /// Time of the first recorded sample on the playback clock,
    /// seconds. Offsetting two recorders by a non-integer number of
    /// sample periods exercises the crossing alignment.
    pub start_time: f64,
    /// Recorder sample rate, Hz.
    pub sample_rate: f64,
    /// Recorder word length in bits.
    pub bit_depth: u32,
    /// Recorded carrier amplitude as a fraction of full scale.
    pub gain: f64,
    /// Recording length, seconds.
    pub duration: f64,
}

impl Default for RecorderSpec {
    fn default() -> Self {
        RecorderSpec {
            start_time: 0.0,
            sample_rate: 192_000.0,
            bit_depth: 24,
            gain: 0.9,
            duration: 1.0,
        }
    }
}

/// Positions of the five playback parts recovered from a generated
/// waveform, all as 0-based sample indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaybackStructure {
    /// First nonzero sample: the fade-in onset.
    pub fade_start: usize,
    /// First sample of the `v_max, 0, -v_max, 0` pattern. The raised
    /// cosine is so flat near full scale that the last few fade
    /// samples round onto the pattern, so this can sit a few carrier
    /// cycles before the true main start; the offset is always a
    /// multiple of four samples, which keeps the carrier phase exact.
    pub main_start: usize,
    /// Last sample still on the full-amplitude pattern.
    pub main_end: usize,
    /// Fade amplitude floor in counts.
    pub v_min: i32,
    /// Main amplitude in counts.
    pub v_max: i32,
}

/// Recovers the five-part layout from a generated playback waveform.
pub fn detect_playback_structure(playback: &SampleBuffer) -> Result<PlaybackStructure> {
    let s = &playback.samples;
    let fade_start = s
        .iter()
        .position(|&v| v != 0)
        .ok_or_else(|| Error::Config("playback waveform is silent".into()))?;
    let v_max = s.iter().map(|&v| v.abs()).max().unwrap();
    let v_min = s[fade_start..(fade_start + 4).min(s.len())]
        .iter()
        .map(|&v| v.abs())
        .max()
        .unwrap();
    let on_pattern = |p: usize| {
        p + 3 < s.len() && s[p] == v_max && s[p + 1] == 0 && s[p + 2] == -v_max && s[p + 3] == 0
    };
    let main_start = (fade_start..s.len())
        .find(|&p| on_pattern(p))
        .ok_or_else(|| Error::Config("playback waveform has no full-amplitude part".into()))?;
    let mut main_end = main_start;
    let mut p = main_start;
    while p + 4 < s.len() && on_pattern(p + 4) {
        p += 4;
        main_end = p + 3;
    }
    if main_end <= main_start {
        return Err(Error::Config("full-amplitude part is shorter than two carrier cycles".into()));
    }
    Ok(PlaybackStructure { fade_start, main_start, main_end, v_min, v_max })
}

/// Simulates recording the playback through a noisy chain.
///
/// `noise.j`, `noise.a_m`, and `noise.n_pi` are the player's noise
/// contributions; `noise.a_total` is this recorder's own additive
/// noise. All four are interpolated from their common grid at each
/// recorder sampling instant, so two recorders passed traces sharing
/// the player terms see the same player noise while keeping
/// independent recorder noise.
///
/// The recorder's anti-alias low-pass is transparent here because all
/// modeled content sits far below its Nyquist frequency. Returns the
/// recording (whose `start_time` is the recorder offset on the
/// playback clock) and the number of saturated samples.
pub fn simulate_recording(
    playback: &SampleBuffer,
    noise: &NoiseTraces,
    rec: &RecorderSpec,
) -> Result<(SampleBuffer, usize)> {
    if !(rec.sample_rate > 0.0) {
        return Err(Error::Config(format!("recorder rate must be positive, got {}", rec.sample_rate)));
    }
    if rec.bit_depth != 16 && rec.bit_depth != 24 {
        return Err(Error::Config(format!("recorder depth must be 16 or 24, got {}", rec.bit_depth)));
    }
    if !(rec.gain > 0.0) {
        return Err(Error::Config(format!("recorder gain must be positive, got {}", rec.gain)));
    }
    let carrier = playback.sample_rate / 4.0;
    if carrier >= rec.sample_rate / 2.0 {
        return Err(Error::Config(format!(
            "tone at {carrier} Hz is beyond the recorder Nyquist at {} Hz",
            rec.sample_rate / 2.0
        )));
    }
    let len = (rec.duration * rec.sample_rate).round() as usize;
    if len < 16 {
        return Err(Error::Config(format!("recording of {} s is too short", rec.duration)));
    }

    let structure = detect_playback_structure(playback)?;
    let omega = std::f64::consts::TAU * carrier;
    let t_anchor = playback.time_of(structure.main_start);
    let t_main_end = playback.time_of(structure.main_end);
    let fade = (structure.main_start - structure.fade_start) as f64 / playback.sample_rate;
    let floor_ratio = structure.v_min as f64 / structure.v_max as f64;
    let envelope = |t: f64| -> f64 {
        let dt = t - t_anchor;
        if dt >= 0.0 && t <= t_main_end {
            1.0
        } else if dt < 0.0 && dt >= -fade {
            floor_ratio + (1.0 + (std::f64::consts::PI * dt / fade).cos()) * (1.0 - floor_ratio) / 2.0
        } else if t > t_main_end && t - t_main_end <= fade {
            floor_ratio
                + (1.0 + (std::f64::consts::PI * (t - t_main_end) / fade).cos()) * (1.0 - floor_ratio) / 2.0
        } else {
            0.0
        }
    };

    let x_max = ((1i64 << (rec.bit_depth - 1)) - 1) as f64;
    let lo = -(1i64 << (rec.bit_depth - 1));
    let hi = (1i64 << (rec.bit_depth - 1)) - 1;
    let mut clipped = 0usize;
    let mut samples = Vec::with_capacity(len);
    for i in 0..len {
        let t = rec.start_time + i as f64 / rec.sample_rate;
        let env = envelope(t);
        let value = if env == 0.0 {
            noise.n_pi_at(t) + noise.a_total_at(t)
        } else {
            let phase = omega * (t - t_anchor);
            rec.gain * env * (phase.cos() - omega * noise.j_at(t) * phase.sin())
                + env * noise.a_m_at(t) * phase.cos()
                + noise.n_pi_at(t)
                + noise.a_total_at(t)
        };
        let mut q = (x_max * value).floor() as i64;
        if q < lo || q > hi {
            clipped += 1;
            q = q.clamp(lo, hi);
        }
        samples.push(q as i32);
    }
    let buffer = SampleBuffer::new(samples, rec.sample_rate, rec.bit_depth, rec.start_time)?;
    Ok((buffer, clipped))
}
