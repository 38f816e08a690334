//! Picosecond-scale sampling-jitter measurement by zero-crossing
//! analysis.
//!
//! The crate covers the whole measurement chain: synthesizing test
//! waveforms with known injected noise, recovering sampling-point
//! fluctuations from recorded carriers via zero-crossing analysis,
//! separating player from recorder contributions with a
//! double-recorder setup, and the frequency-domain and
//! Hilbert-transform baselines used for cross-checking.

pub mod baseline;
pub mod buffer;
pub mod decompose;
pub mod dsp;
pub mod error;
pub mod synth;
pub mod wav;
pub mod zca;

pub use buffer::{NoiseTraces, SampleBuffer};
pub use error::{Error, Result};
