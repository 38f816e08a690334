//! Dummy recorded waveforms with known injected noise.
//!
//! A dummy models the recorded carrier directly, skipping the player
//! and recorder hardware: a constant-amplitude tone plus the
//! first-order noise terms, floor-quantized to the recorder word
//! length. Because every injected noise trace is kept, analyses can be
//! validated sample-by-sample against the exact ground truth.

use super::{bandlimited_noise_stream, seeded_rng};
use crate::buffer::{NoiseTraces, SampleBuffer};
use crate::error::{Error, Result};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Parameters of a synthesized dummy recording.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DummySpec {
    /// Carrier frequency, Hz. The default is deliberately
    /// incommensurate with the sample rate so crossings sweep all
    /// sampling phases.
    pub carrier: f64,
    /// Carrier amplitude as a fraction of full scale.
    pub amplitude_ratio: f64,
    /// Carrier phase at t = 0, radians.
    pub theta0: f64,
    /// Full-bandwidth RMS of the jitter process before filtering,
    /// seconds.
    pub jitter_rms: f64,
    /// Noise bandwidth `B_W`, Hz: jitter and amplitude modulation are
    /// low-passed to it, additive noise band-passed to the carrier
    /// plus/minus it.
    pub bandwidth: f64,
    /// Recorder sample rate, Hz.
    pub sample_rate: f64,
    /// Recorder word length in bits.
    pub bit_depth: u32,
    /// Recording length, seconds.
    pub duration: f64,
    /// Seed for all noise streams.
    pub seed: u64,
    /// Inject sampling jitter `-A0 w j(t) sin(w t + theta0)`.
    pub jitter_on: bool,
    /// Inject amplitude modulation `A_M(t) cos(w t + theta0)`.
    pub am_on: bool,
    /// Inject phase-incoherent additive noise `n_PI(t)`.
    pub pi_on: bool,
    /// Inject recorder-side additive noise `a_total(t)`.
    pub recorder_noise_on: bool,
    /// Full-bandwidth equivalent-jitter RMS of the recorder noise,
    /// seconds; used only when `recorder_noise_on` is set.
    pub recorder_noise_rms: f64,
}

impl Default for DummySpec {
    fn default() -> Self {
        DummySpec {
            carrier: 11_884.877,
            amplitude_ratio: 0.9,
            theta0: 0.0,
            jitter_rms: 160e-12,
            bandwidth: 6_000.0,
            sample_rate: 192_000.0,
            bit_depth: 24,
            duration: 1.6,
            seed: 1,
            jitter_on: false,
            am_on: false,
            pi_on: false,
            recorder_noise_on: false,
            recorder_noise_rms: 160e-12,
        }
    }
}

impl DummySpec {
    fn validate(&self) -> Result<()> {
        if !(self.carrier > 0.0) {
            return Err(Error::Config(format!("carrier must be positive, got {}", self.carrier)));
        }
        if !(self.amplitude_ratio > 0.0) {
            return Err(Error::Config(format!(
                "amplitude ratio must be positive, got {}",
                self.amplitude_ratio
            )));
        }
        if self.bit_depth != 16 && self.bit_depth != 24 {
            return Err(Error::Config(format!("bit depth must be 16 or 24, got {}", self.bit_depth)));
        }
        if !(self.bandwidth > 0.0) || self.carrier - self.bandwidth <= 0.0 {
            return Err(Error::Config(format!(
                "noise band must stay above DC: carrier {} Hz, bandwidth {} Hz",
                self.carrier, self.bandwidth
            )));
        }
        if self.carrier + self.bandwidth >= self.sample_rate / 2.0 {
            return Err(Error::Config(format!(
                "noise band must stay below Nyquist: carrier {} Hz, bandwidth {} Hz at {} Hz",
                self.carrier, self.bandwidth, self.sample_rate
            )));
        }
        if !(self.jitter_rms >= 0.0) || !(self.recorder_noise_rms >= 0.0) {
            return Err(Error::Config("noise RMS values must be non-negative".into()));
        }
        let len = (self.duration * self.sample_rate).round();
        if !(len >= 16.0) {
            return Err(Error::Config(format!("duration {} s is too short", self.duration)));
        }
        Ok(())
    }

    /// Number of samples in the synthesized recording.
    pub fn len(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    /// Angular carrier frequency, rad/s.
    pub fn omega(&self) -> f64 {
        std::f64::consts::TAU * self.carrier
    }
}

/// A synthesized dummy recording with its ground truth.
#[derive(Debug, Clone)]
pub struct DummyOutput {
    /// The quantized recording.
    pub buffer: SampleBuffer,
    /// The exact injected noise traces on the recording's grid.
    pub traces: NoiseTraces,
    /// Samples that had to be saturated to the word-length range.
    pub clipped: usize,
}

/// Builds the injected noise traces for `spec` on the recorder grid.
///
/// Streams are derived deterministically from the seed, one per noise
/// kind, so enabling one kind never changes the realization of
/// another. Disabled kinds are all-zero.
pub fn make_dummy_traces(spec: &DummySpec) -> Result<NoiseTraces> {
    spec.validate()?;
    let len = spec.len();
    let rate = spec.sample_rate;
    let amp_noise_rms = spec.amplitude_ratio * spec.omega() * spec.jitter_rms;
    let mut traces = NoiseTraces::zeros(len, rate, 0.0);
    if spec.jitter_on {
        traces.j =
            bandlimited_noise_stream(len, rate, spec.jitter_rms, (0.0, spec.bandwidth), spec.seed, 1)?;
    }
    if spec.am_on {
        traces.a_m =
            bandlimited_noise_stream(len, rate, amp_noise_rms, (0.0, spec.bandwidth), spec.seed, 2)?;
    }
    let band = (spec.carrier - spec.bandwidth, spec.carrier + spec.bandwidth);
    if spec.pi_on {
        traces.n_pi = bandlimited_noise_stream(len, rate, amp_noise_rms, band, spec.seed, 3)?;
    }
    if spec.recorder_noise_on {
        let rec_rms = spec.amplitude_ratio * spec.omega() * spec.recorder_noise_rms;
        traces.a_total = bandlimited_noise_stream(len, rate, rec_rms, band, spec.seed, 4)?;
    }
    Ok(traces)
}

/// Synthesizes the dummy recording for `spec`.
///
/// Sample `i` at `t = i / sample_rate` is the floor-quantized value of
/// `A0 cos(w t + theta0) - A0 w j(t) sin(w t + theta0)
///  + A_M(t) cos(w t + theta0) + n_PI(t) + a_total(t)`
/// scaled by full scale, saturating at the word-length range.
pub fn synthesize_dummy(spec: &DummySpec) -> Result<DummyOutput> {
    let traces = make_dummy_traces(spec)?;
    let len = spec.len();
    let omega = spec.omega();
    let a0 = spec.amplitude_ratio;
    let x_max = ((1i64 << (spec.bit_depth - 1)) - 1) as f64;
    let lo = -(1i64 << (spec.bit_depth - 1));
    let hi = (1i64 << (spec.bit_depth - 1)) - 1;

    let mut clipped = 0usize;
    let mut samples = Vec::with_capacity(len);
    for i in 0..len {
        let t = i as f64 / spec.sample_rate;
        let phase = omega * t + spec.theta0;
        let value = a0 * phase.cos() - a0 * omega * traces.j[i] * phase.sin()
            + traces.a_m[i] * phase.cos()
            + traces.n_pi[i]
            + traces.a_total[i];
        let mut q = (x_max * value).floor() as i64;
        if q < lo || q > hi {
            clipped += 1;
            q = q.clamp(lo, hi);
        }
        samples.push(q as i32);
    }
    let buffer = SampleBuffer::new(samples, spec.sample_rate, spec.bit_depth, 0.0)?;
    Ok(DummyOutput { buffer, traces, clipped })
}

/// Gaussian white noise of the given RMS, for synthetic statistics
/// tests; ChaCha12 keyed by `(seed, stream)`.
pub fn white_noise(len: usize, rms: f64, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = seeded_rng(seed, stream);
    (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * rms
        })
        .collect()
}
