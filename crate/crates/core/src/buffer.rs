//! Sample buffers and noise ground-truth traces.
//!
//! A [`SampleBuffer`] holds one channel of integer PCM samples together
//! with the clock information needed to place each sample on a time
//! axis: sample `i` (0-based) sits at `start_time + i / sample_rate`
//! seconds in the clock of the device that produced it.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One channel of integer PCM audio with its sampling clock.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleBuffer {
    /// Raw sample values, two's complement at `bit_depth` bits.
    pub samples: Vec<i32>,
    /// Sampling rate in Hz.
    pub sample_rate: f64,
    /// Word length in bits, 16 or 24.
    pub bit_depth: u32,
    /// Time of sample 0 in the producing device's clock, seconds.
    pub start_time: f64,
}

impl SampleBuffer {
    /// Builds a buffer after validating the documented invariants.
    pub fn new(samples: Vec<i32>, sample_rate: f64, bit_depth: u32, start_time: f64) -> Result<Self> {
        if !(sample_rate > 0.0) {
            return Err(Error::Config(format!("sample rate must be positive, got {sample_rate}")));
        }
        if bit_depth != 16 && bit_depth != 24 {
            return Err(Error::Config(format!("bit depth must be 16 or 24, got {bit_depth}")));
        }
        let lo = -(1i32 << (bit_depth - 1));
        let hi = (1i32 << (bit_depth - 1)) - 1;
        if let Some(&bad) = samples.iter().find(|&&s| s < lo || s > hi) {
            return Err(Error::Config(format!(
                "sample value {bad} outside the {bit_depth}-bit range [{lo}, {hi}]"
            )));
        }
        Ok(SampleBuffer { samples, sample_rate, bit_depth, start_time })
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// True when the buffer holds no samples.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Positive full-scale count `2^(bit_depth-1) - 1`; an input of
    /// amplitude 1.0 in full-scale units records at this value.
    pub fn full_scale(&self) -> f64 {
        ((1i64 << (self.bit_depth - 1)) - 1) as f64
    }

    /// Time of sample `index` in the producing device's clock, seconds.
    pub fn time_of(&self, index: usize) -> f64 {
        self.start_time + index as f64 / self.sample_rate
    }

    /// Samples scaled to full-scale units (full scale maps to 1.0).
    pub fn to_normalized(&self) -> Vec<f64> {
        let fs = self.full_scale();
        self.samples.iter().map(|&s| s as f64 / fs).collect()
    }
}

/// Ground-truth noise traces recorded during synthesis, aligned to a
/// uniform sample grid so analyses can be validated against the exact
/// injected waveforms.
///
/// All four traces share one grid. Disabled noise kinds are stored as
/// all-zero traces of the same length. Units: `j` is in seconds, the
/// other three are in full-scale amplitude units.
#[derive(Debug, Clone, Default)]
pub struct NoiseTraces {
    /// Grid rate in Hz.
    pub sample_rate: f64,
    /// Time of trace sample 0, seconds.
    pub start_time: f64,
    /// Sampling-point fluctuation j(t), seconds.
    pub j: Vec<f64>,
    /// Amplitude-modulation envelope A_M(t), full-scale units.
    pub a_m: Vec<f64>,
    /// Phase-incoherent additive noise n_PI(t), full-scale units.
    pub n_pi: Vec<f64>,
    /// Recorder-side additive noise a_total(t), full-scale units.
    pub a_total: Vec<f64>,
}

impl NoiseTraces {
    /// All-zero traces of length `len` on the given grid.
    pub fn zeros(len: usize, sample_rate: f64, start_time: f64) -> Self {
        NoiseTraces {
            sample_rate,
            start_time,
            j: vec![0.0; len],
            a_m: vec![0.0; len],
            n_pi: vec![0.0; len],
            a_total: vec![0.0; len],
        }
    }

    /// Injected jitter at time `t`, interpolated from the grid.
    pub fn j_at(&self, t: f64) -> f64 {
        sample_trace(&self.j, self.sample_rate, self.start_time, t)
    }

    /// Injected amplitude modulation at time `t`.
    pub fn a_m_at(&self, t: f64) -> f64 {
        sample_trace(&self.a_m, self.sample_rate, self.start_time, t)
    }

    /// Injected phase-incoherent noise at time `t`.
    pub fn n_pi_at(&self, t: f64) -> f64 {
        sample_trace(&self.n_pi, self.sample_rate, self.start_time, t)
    }

    /// Injected recorder noise at time `t`.
    pub fn a_total_at(&self, t: f64) -> f64 {
        sample_trace(&self.a_total, self.sample_rate, self.start_time, t)
    }
}

/// Evaluates a gridded trace at an arbitrary time by Catmull-Rom cubic
/// interpolation. The traces produced here are band-limited far below
/// the grid Nyquist, so a local cubic is accurate to well under one
/// percent of the trace amplitude. Outside the grid the trace is
/// treated as zero, and the outermost two grid intervals use a clamped
/// stencil that is less accurate than the interior.
pub fn sample_trace(trace: &[f64], sample_rate: f64, start_time: f64, t: f64) -> f64 {
    if trace.is_empty() {
        return 0.0;
    }
    let x = (t - start_time) * sample_rate;
    if x < 0.0 || x > (trace.len() - 1) as f64 {
        return 0.0;
    }
    let i1 = (x.floor() as usize).min(trace.len() - 2);
    let u = x - i1 as f64;
    let at = |i: isize| -> f64 {
        let i = i.clamp(0, trace.len() as isize - 1) as usize;
        trace[i]
    };
    let (p0, p1, p2, p3) = (at(i1 as isize - 1), at(i1 as isize), at(i1 as isize + 1), at(i1 as isize + 2));
    0.5 * ((2.0 * p1)
        + (-p0 + p2) * u
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u
        + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u)
}
